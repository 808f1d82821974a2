//
// Copyright (C) 2026 The sketchchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include "sketchchain/types.hpp"

#include <span>

namespace sketchchain {

/// Sharpness of a joint with interior angle θ: 1 − exp(−|π − θ|).
double joint_sharpness(double theta);

/// Interior angle at a joint with signed exterior turn τ: π − τ in [0, 2π).
double theta_from_turn(double turn);

/// Builds the descriptor of a chain with at least two segments. Throws
/// Error(too_short) otherwise.
ChainDescriptor build_descriptor(const Chain& chain, double lambda_skc);

/// Same as build_descriptor but straight from a joint list.
ChainDescriptor build_descriptor(std::span<const Point2> joints, double lambda_skc);

/// Descriptor from raw per-joint features. Segment lengths are synthesized
/// from the ratios (first segment = 1); points default to the origin.
ChainDescriptor descriptor_from_features(std::span<const double> gammas,
                                         std::span<const double> thetas,
                                         std::span<const double> skip_weights,
                                         std::span<const Point2> points = {});

/// Descriptor of the reversed and/or mirrored chain. Composes with the
/// descriptor's current variant, so applying the same variant twice restores
/// the original bit for bit.
ChainDescriptor variant_descriptor(const ChainDescriptor& d, FlipVariant variant);

}  // namespace sketchchain
