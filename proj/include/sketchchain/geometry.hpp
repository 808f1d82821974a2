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

#include <Eigen/Core>

#include <numbers>
#include <span>
#include <vector>

namespace sketchchain {

using Point2 = Eigen::Vector2d;
using Polyline = std::vector<Point2>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Side length of the normalized image frame. Every image and sketch is
/// scaled so that its longest side spans this many units.
inline constexpr double kFrameSize = 256.0;

/// Maps an angle into [0, 2π).
double wrap_two_pi(double angle);

/// Smallest absolute difference between two angles, in [0, π].
double circular_difference(double a, double b);

/// Unsigned angle ∠(a, vertex, c) in [0, π]. Degenerate arms give 0.
double vertex_angle(const Point2& a, const Point2& vertex, const Point2& c);

/// Signed turn from the direction (at − prev) to (next − at), in (−π, π],
/// anticlockwise positive.
double signed_turn(const Point2& prev, const Point2& at, const Point2& next);

/// Signed angle of `v` relative to `axis`, in (−π, π].
double relative_angle(const Point2& axis, const Point2& v);

double polyline_length(std::span<const Point2> points);

Point2 centroid(std::span<const Point2> points);

/// Removes consecutive points closer than `eps`.
Polyline dedupe_consecutive(std::span<const Point2> points, double eps = 1e-9);

/// Uniform arc-length resampling; the first and last input points are kept.
Polyline resample_polyline(std::span<const Point2> points, double step);

/// Uniformly scales `points` so that max(width, height) maps to kFrameSize.
/// Throws Error(invalid_input) on a degenerate frame.
Polyline normalize_frame(std::span<const Point2> points, double width, double height);

/// Scale factor applied by normalize_frame.
double frame_scale(double width, double height);

}  // namespace sketchchain
