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

#include "sketchchain/geometry.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sketchchain {

enum class ErrorCode {
  invalid_input,
  too_short,
  empty_query,
  format,
  version,
  io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class ChainSource : std::uint8_t { csn, region, sketch };

std::string_view to_string(ChainSource source);
std::optional<ChainSource> parse_chain_source(std::string_view name);

/// Traversal/reflection applied to a descriptor. Encoded as two bits so that
/// composition is a xor: bit 0 = reversed, bit 1 = mirrored.
enum class FlipVariant : std::uint8_t {
  identity = 0,
  reversed = 1,
  mirrored = 2,
  reversed_mirrored = 3,
};

inline constexpr FlipVariant kAllVariants[] = {FlipVariant::identity, FlipVariant::reversed,
                                               FlipVariant::mirrored,
                                               FlipVariant::reversed_mirrored};

constexpr FlipVariant compose(FlipVariant a, FlipVariant b) {
  return static_cast<FlipVariant>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
constexpr bool is_reversed(FlipVariant v) { return (static_cast<std::uint8_t>(v) & 1u) != 0; }
constexpr bool is_mirrored(FlipVariant v) { return (static_cast<std::uint8_t>(v) & 2u) != 0; }

std::string_view to_string(FlipVariant variant);

/// An ordered polyline of joints in the normalized frame.
struct Chain {
  std::string image_id;
  std::string chain_id;
  ChainSource source = ChainSource::csn;
  Polyline joints;
  std::vector<double> segment_lengths;

  double length() const;
};

/// Validates the joints (finite, ≥ 2, consecutive joints distinct) and fills
/// segment_lengths.
Chain make_chain(std::string image_id, std::string chain_id, ChainSource source, Polyline joints);

/// Per-joint similarity-invariant features of a chain.
///
/// `turns` and `segment_lengths` are the primary encoding: the signed exterior
/// turn τ at each interior joint and the N segment lengths. `gammas` and
/// `thetas` are derived from them (θ = π − τ), which keeps the flip variants
/// exact involutions. Descriptors built from raw features (tests, synthetic
/// data) carry unit-based synthetic lengths.
struct ChainDescriptor {
  std::vector<double> gammas;
  std::vector<double> thetas;
  std::vector<double> skip_weights;
  Polyline points;
  std::vector<double> segment_lengths;
  std::vector<double> turns;
  double total_length = 0.0;
  FlipVariant variant = FlipVariant::identity;

  std::size_t size() const { return gammas.size(); }
};

/// One DP alignment between descriptor A and the `variant_used` variant of B.
/// Indices in `pairs` and `skipped_b` refer to joints of that variant.
struct MatchResult {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> skipped_a;
  std::vector<int> skipped_b;
  double cms = 0.0;
  double gac = 1.0;
  double score = 0.0;
  FlipVariant variant_used = FlipVariant::identity;
};

struct ImageRecord {
  std::string image_id;
  std::vector<Chain> chains;
  std::vector<ChainDescriptor> descriptors;
};

}  // namespace sketchchain
