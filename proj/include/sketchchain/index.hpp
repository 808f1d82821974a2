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

#include "sketchchain/matcher.hpp"
#include "sketchchain/params.hpp"
#include "sketchchain/store.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sketchchain {

/// Node of the hierarchical k-medoids tree. Internal nodes route by the
/// medoid of each child; leaves list member chains (flat store indices).
struct IndexNode {
  int medoid = -1;  // flat store index of the routing chain, -1 at the root
  int depth = 0;
  std::vector<int> children;
  std::vector<int> members;

  bool is_leaf() const { return children.empty(); }
};

struct ChainTree {
  std::shared_ptr<const ChainStore> store;
  IndexParams params;
  MatchParams match;
  std::uint64_t seed = 0;
  std::vector<IndexNode> nodes;  // nodes[0] is the root

  bool empty() const { return nodes.empty() || store == nullptr || store->chain_count() == 0; }
  int depth() const;
  std::size_t leaf_count() const;
};

/// Deterministic uniform double in [0, 1) from a 64-bit engine.
double uniform01(std::mt19937_64& rng);

/// Chosen medoids (positions into `chains`) plus each chain's chain score to
/// every medoid, so the assignment step can reuse them.
struct MedoidSeeding {
  std::vector<int> medoids;
  std::vector<std::vector<double>> scores;  // [chain][medoid]
};

/// k-means++ seeding with d(a, b) = 1 / (1 + CS(a, b)).
MedoidSeeding kpp_seed(std::span<const ChainDescriptor* const> chains, int k, std::mt19937_64& rng,
                       const MatchParams& params);

std::vector<int> kpp_init(std::span<const ChainDescriptor> chains, int k, std::uint64_t seed,
                          const MatchParams& params);

/// Chain i goes to every medoid scoring at least th_ms times its best score.
std::vector<std::vector<int>> assign_by_scores(const std::vector<std::vector<double>>& scores,
                                               double th_ms);

std::vector<std::vector<int>> assign_multi(std::span<const ChainDescriptor> chains,
                                           std::span<const ChainDescriptor> medoids, double th_ms,
                                           const MatchParams& params);

ChainTree build_tree(std::shared_ptr<const ChainStore> store, const IndexParams& params,
                     const MatchParams& match, std::uint64_t seed);

struct SearchHit {
  int image = 0;           // image index in the store
  std::size_t chain = 0;   // flat store index of the best chain of that image
  double score = 0.0;      // chain score of the query against that chain
};

/// Best-bin-first descent; stops once `target_candidates` distinct images
/// were reached or the frontier is empty. One hit per image, best first.
std::vector<SearchHit> search(const ChainTree& tree, const ChainDescriptor& query,
                              int target_candidates, bool query_is_sketch = true);

/// Scores the query against every stored chain; one hit per image, best first.
std::vector<SearchHit> exhaustive_search(const ChainStore& store, const ChainDescriptor& query,
                                         const MatchParams& params, bool query_is_sketch = true);

}  // namespace sketchchain
