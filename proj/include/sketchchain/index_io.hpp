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

#include "sketchchain/index.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace sketchchain {

inline constexpr char kIndexMagic[4] = {'S', 'K', 'C', 'H'};
inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// Binary index container: magic "SKCH", u32 format version, length-prefixed
/// JSON manifest (seed, parameters, counts), the chain store, the tree nodes
/// and a trailing end marker. All integers and doubles little-endian.
void save_index(const ChainTree& tree, const Params& params, std::ostream& out);
void save_index(const ChainTree& tree, const Params& params, const std::string& path);

struct LoadedIndex {
  ChainTree tree;
  Params params;
};

/// Throws Error(format) on bad magic or truncation, Error(version) on an
/// unknown format version. Never returns a partial tree.
LoadedIndex load_index(std::istream& in);
LoadedIndex load_index(const std::string& path);

}  // namespace sketchchain
