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

#include "sketchchain/geometry.hpp"

#include "sketchchain/types.hpp"

#include <algorithm>
#include <cmath>

namespace sketchchain {

namespace {

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

double wrap_two_pi(double angle) {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped -= kTwoPi;
  return wrapped;
}

double circular_difference(double a, double b) {
  const double d = std::fabs(wrap_two_pi(a) - wrap_two_pi(b));
  return d > kPi ? kTwoPi - d : d;
}

double vertex_angle(const Point2& a, const Point2& vertex, const Point2& c) {
  const Point2 u = a - vertex;
  const Point2 v = c - vertex;
  if (u.squaredNorm() == 0.0 || v.squaredNorm() == 0.0) return 0.0;
  return std::atan2(std::fabs(cross(u, v)), u.dot(v));
}

double signed_turn(const Point2& prev, const Point2& at, const Point2& next) {
  const Point2 in = at - prev;
  const Point2 out = next - at;
  double turn = std::atan2(cross(in, out), in.dot(out));
  // atan2 can return −π for a reversal; keep the half-open range (−π, π].
  if (turn <= -kPi) turn = kPi;
  return turn;
}

double relative_angle(const Point2& axis, const Point2& v) {
  if (axis.squaredNorm() == 0.0 || v.squaredNorm() == 0.0) return 0.0;
  double a = std::atan2(cross(axis, v), axis.dot(v));
  if (a <= -kPi) a = kPi;
  return a;
}

double polyline_length(std::span<const Point2> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += (points[i] - points[i - 1]).norm();
  return total;
}

Point2 centroid(std::span<const Point2> points) {
  Point2 sum = Point2::Zero();
  if (points.empty()) return sum;
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

Polyline dedupe_consecutive(std::span<const Point2> points, double eps) {
  Polyline out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (out.empty() || (p - out.back()).norm() > eps) out.push_back(p);
  }
  return out;
}

Polyline resample_polyline(std::span<const Point2> points, double step) {
  if (step <= 0.0) throw Error(ErrorCode::invalid_input, "resample step must be positive");
  Polyline out;
  if (points.empty()) return out;
  out.push_back(points.front());
  // Distance still to travel along the polyline before the next sample.
  double pending = step;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Point2 a = points[i - 1];
    const Point2 b = points[i];
    const double len = (b - a).norm();
    double walked = 0.0;
    while (len - walked >= pending) {
      walked += pending;
      out.push_back(a + (b - a) * (walked / len));
      pending = step;
    }
    pending -= len - walked;
  }
  const Point2& last = points.back();
  if ((out.back() - last).norm() > 1e-9) {
    // Fold a sliver tail into the final point instead of a tiny segment.
    if (out.size() > 1 && (out.back() - last).norm() < 0.25 * step) out.back() = last;
    else out.push_back(last);
  }
  return out;
}

double frame_scale(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw Error(ErrorCode::invalid_input, "image frame must have positive width and height");
  }
  return kFrameSize / std::max(width, height);
}

Polyline normalize_frame(std::span<const Point2> points, double width, double height) {
  const double scale = frame_scale(width, height);
  Polyline out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (!p.allFinite()) throw Error(ErrorCode::invalid_input, "non-finite coordinate");
    out.push_back(p * scale);
  }
  return out;
}

}  // namespace sketchchain
