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

#include "sketchchain/descriptor.hpp"

#include <algorithm>
#include <cmath>

namespace sketchchain {

namespace {

double negate_turn(double turn) {
  // −π is outside (−π, π]; a full reversal stays a full reversal.
  return turn >= kPi ? kPi : -turn;
}

// Fills gammas and thetas from segment_lengths and turns.
void derive_features(ChainDescriptor& d) {
  const std::size_t joints = d.turns.size();
  d.gammas.resize(joints);
  d.thetas.resize(joints);
  for (std::size_t i = 0; i < joints; ++i) {
    d.gammas[i] = d.segment_lengths[i] / d.segment_lengths[i + 1];
    d.thetas[i] = theta_from_turn(d.turns[i]);
  }
}

}  // namespace

double joint_sharpness(double theta) { return 1.0 - std::exp(-std::fabs(kPi - theta)); }

double theta_from_turn(double turn) {
  const double theta = kPi - turn;
  return theta >= kTwoPi ? theta - kTwoPi : theta;
}

ChainDescriptor build_descriptor(std::span<const Point2> joints, double lambda_skc) {
  if (joints.size() < 3) {
    throw Error(ErrorCode::too_short, "a descriptor needs at least two segments");
  }
  ChainDescriptor d;
  const std::size_t segments = joints.size() - 1;
  d.segment_lengths.resize(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    d.segment_lengths[i] = (joints[i + 1] - joints[i]).norm();
    if (!(d.segment_lengths[i] > 0.0) || !std::isfinite(d.segment_lengths[i])) {
      throw Error(ErrorCode::invalid_input, "consecutive joints must be distinct and finite");
    }
    d.total_length += d.segment_lengths[i];
  }

  const std::size_t interior = segments - 1;
  d.turns.resize(interior);
  d.skip_weights.resize(interior);
  d.points.assign(joints.begin() + 1, joints.end() - 1);
  for (std::size_t i = 0; i < interior; ++i) {
    d.turns[i] = signed_turn(joints[i], joints[i + 1], joints[i + 2]);
    const double sharpness = 1.0 - std::exp(-std::fabs(d.turns[i]));
    const double mean_length = 0.5 * (d.segment_lengths[i] + d.segment_lengths[i + 1]);
    d.skip_weights[i] = sharpness + lambda_skc * mean_length / d.total_length;
  }
  derive_features(d);
  return d;
}

ChainDescriptor build_descriptor(const Chain& chain, double lambda_skc) {
  return build_descriptor(std::span<const Point2>(chain.joints), lambda_skc);
}

ChainDescriptor descriptor_from_features(std::span<const double> gammas,
                                         std::span<const double> thetas,
                                         std::span<const double> skip_weights,
                                         std::span<const Point2> points) {
  const std::size_t n = gammas.size();
  if (n == 0 || thetas.size() != n || skip_weights.size() != n ||
      (!points.empty() && points.size() != n)) {
    throw Error(ErrorCode::invalid_input, "descriptor feature lists must be non-empty and equal");
  }
  ChainDescriptor d;
  d.gammas.assign(gammas.begin(), gammas.end());
  d.skip_weights.assign(skip_weights.begin(), skip_weights.end());
  d.segment_lengths.resize(n + 1);
  d.segment_lengths[0] = 1.0;
  d.turns.resize(n);
  d.thetas.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(gammas[i] > 0.0) || !std::isfinite(gammas[i])) {
      throw Error(ErrorCode::invalid_input, "length ratios must be positive and finite");
    }
    d.segment_lengths[i + 1] = d.segment_lengths[i] / gammas[i];
    d.turns[i] = kPi - wrap_two_pi(thetas[i]);
    d.thetas[i] = theta_from_turn(d.turns[i]);
  }
  for (double l : d.segment_lengths) d.total_length += l;
  if (points.empty()) d.points.assign(n, Point2::Zero());
  else d.points.assign(points.begin(), points.end());
  return d;
}

ChainDescriptor variant_descriptor(const ChainDescriptor& d, FlipVariant variant) {
  if (variant == FlipVariant::identity) return d;
  ChainDescriptor out = d;
  out.variant = compose(d.variant, variant);
  if (is_reversed(variant)) {
    std::reverse(out.segment_lengths.begin(), out.segment_lengths.end());
    std::reverse(out.turns.begin(), out.turns.end());
    std::reverse(out.skip_weights.begin(), out.skip_weights.end());
    std::reverse(out.points.begin(), out.points.end());
    for (double& t : out.turns) t = negate_turn(t);
  }
  if (is_mirrored(variant)) {
    for (double& t : out.turns) t = negate_turn(t);
  }
  derive_features(out);
  return out;
}

}  // namespace sketchchain
