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

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sketchchain {

/// Position of a chain inside a ChainStore.
struct ChainRef {
  int image = 0;
  int chain = 0;
};

/// All database chains grouped by image, with their descriptors. Chains keep a
/// flat insertion-order index used by the tree.
class ChainStore {
 public:
  explicit ChainStore(double lambda_skc = 0.5) : lambda_skc_(lambda_skc) {}

  /// Builds the descriptor and files the chain under its image. Throws
  /// Error(too_short) for chains without an interior joint.
  void add(Chain chain);

  std::size_t chain_count() const { return flat_.size(); }
  std::size_t image_count() const { return images_.size(); }
  double lambda_skc() const { return lambda_skc_; }

  std::span<const ImageRecord> images() const { return images_; }
  const ImageRecord& image(int index) const { return images_[static_cast<std::size_t>(index)]; }
  const ImageRecord* find(std::string_view image_id) const;
  int image_index(std::string_view image_id) const;

  ChainRef ref(std::size_t flat_index) const { return flat_[flat_index]; }
  const Chain& chain(std::size_t flat_index) const;
  const ChainDescriptor& descriptor(std::size_t flat_index) const;

 private:
  double lambda_skc_;
  std::vector<ImageRecord> images_;
  std::vector<ChainRef> flat_;
  std::map<std::string, int, std::less<>> by_id_;
};

struct IngestIssue {
  std::size_t line = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<IngestIssue> skipped;
  std::vector<std::string> warnings;
};

inline constexpr int kChainFormatVersion = 1;

/// Reads chain JSONL: one {image_id, chain_id, source, points, original_size}
/// object per line, optionally preceded by a {"format": "sketchchain-chains",
/// "version": N} header. Malformed lines are reported and skipped.
IngestReport ingest_corpus(std::istream& in, ChainStore& store);
IngestReport ingest_corpus(const std::string& path, ChainStore& store);

/// One chain JSONL record (points in the normalized frame).
std::string chain_to_jsonl(const Chain& chain);

}  // namespace sketchchain
