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

#include "sketchchain/types.hpp"

#include <cmath>

namespace sketchchain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::too_short: return "too_short";
    case ErrorCode::empty_query: return "empty_query";
    case ErrorCode::format: return "format";
    case ErrorCode::version: return "version";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

std::string_view to_string(ChainSource source) {
  switch (source) {
    case ChainSource::csn: return "csn";
    case ChainSource::region: return "region";
    case ChainSource::sketch: return "sketch";
  }
  return "csn";
}

std::optional<ChainSource> parse_chain_source(std::string_view name) {
  if (name == "csn") return ChainSource::csn;
  if (name == "region") return ChainSource::region;
  if (name == "sketch") return ChainSource::sketch;
  return std::nullopt;
}

std::string_view to_string(FlipVariant variant) {
  switch (variant) {
    case FlipVariant::identity: return "identity";
    case FlipVariant::reversed: return "reversed";
    case FlipVariant::mirrored: return "mirrored";
    case FlipVariant::reversed_mirrored: return "reversed_mirrored";
  }
  return "identity";
}

double Chain::length() const {
  double total = 0.0;
  for (double l : segment_lengths) total += l;
  return total;
}

Chain make_chain(std::string image_id, std::string chain_id, ChainSource source, Polyline joints) {
  if (joints.size() < 2) {
    throw Error(ErrorCode::too_short, "a chain needs at least two joints");
  }
  Chain chain;
  chain.image_id = std::move(image_id);
  chain.chain_id = std::move(chain_id);
  chain.source = source;
  chain.segment_lengths.reserve(joints.size() - 1);
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (!joints[i].allFinite()) throw Error(ErrorCode::invalid_input, "non-finite joint");
    if (i == 0) continue;
    const double len = (joints[i] - joints[i - 1]).norm();
    if (!(len > 0.0)) {
      throw Error(ErrorCode::invalid_input, "consecutive joints must be distinct");
    }
    chain.segment_lengths.push_back(len);
  }
  chain.joints = std::move(joints);
  return chain;
}

}  // namespace sketchchain
