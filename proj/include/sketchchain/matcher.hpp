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

#include "sketchchain/params.hpp"
#include "sketchchain/types.hpp"

#include <span>
#include <utility>

namespace sketchchain {

/// Ω(a, b) = min(a/b, b/a). Throws Error(invalid_input) unless a, b > 0.
double ratio_similarity(double a, double b);

/// exp(−λ_lr · (1 − Ω(γ_x, γ_y))).
double length_ratio_score(double gamma_x, double gamma_y, const MatchParams& params);

/// exp(−λ_ang · |θ_x − θ_y|) with the circular difference in [0, π].
double angle_score(double theta_x, double theta_y, const MatchParams& params);

/// S_jnt = S_lr · S_ang.
double joint_score(double gamma_x, double theta_x, double gamma_y, double theta_y,
                   const MatchParams& params);

/// Local DP alignment with penalized skips. Returns the chain matching score
/// and the alignment recovered from the best cell (gac/score left at their
/// defaults, variant_used copied from b).
MatchResult dp_match(const ChainDescriptor& a, const ChainDescriptor& b, double alpha_a,
                     double alpha_b, const MatchParams& params);

/// Agreement of the angles subtended at the matched-joint centroids by
/// consecutive matched joints. 1 for fewer than two pairs.
double global_angle_consistency(const ChainDescriptor& a, const ChainDescriptor& b,
                                std::span<const std::pair<int, int>> pairs, double lambda_ac);

/// Best alignment of `a` against all four variants of `b`, weighted by its
/// global angle consistency. With `a_is_sketch`, `a` skips cost alpha_sketch;
/// otherwise both sides use alpha_image.
MatchResult chain_similarity(const ChainDescriptor& a, const ChainDescriptor& b, bool a_is_sketch,
                             const MatchParams& params);

/// chain_similarity(...).score without keeping the alignment.
double chain_score(const ChainDescriptor& a, const ChainDescriptor& b, bool a_is_sketch,
                   const MatchParams& params);

}  // namespace sketchchain
