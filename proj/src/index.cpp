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

#include "sketchchain/index.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>

namespace sketchchain {

int ChainTree::depth() const {
  int deepest = 0;
  for (const auto& node : nodes) deepest = std::max(deepest, node.depth);
  return deepest;
}

std::size_t ChainTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const IndexNode& n) { return n.is_leaf(); }));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

MedoidSeeding kpp_seed(std::span<const ChainDescriptor* const> chains, int k, std::mt19937_64& rng,
                       const MatchParams& params) {
  MedoidSeeding out;
  const std::size_t n = chains.size();
  if (n == 0 || k <= 0) return out;
  out.scores.assign(n, {});
  auto add_medoid = [&](std::size_t m) {
    out.medoids.push_back(static_cast<int>(m));
    for (std::size_t i = 0; i < n; ++i) {
      out.scores[i].push_back(chain_score(*chains[i], *chains[m], false, params));
    }
  };
  if (n <= static_cast<std::size_t>(k)) {
    for (std::size_t m = 0; m < n; ++m) add_medoid(m);
    return out;
  }

  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);
  std::size_t next = std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
  std::vector<double> weight(n, 0.0);
  while (true) {
    chosen[next] = true;
    add_medoid(next);
    if (out.medoids.size() == static_cast<std::size_t>(k)) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::max(best[i], out.scores[i].back());
      const double d = 1.0 / (1.0 + best[i]);
      weight[i] = chosen[i] ? 0.0 : d * d;
      total += weight[i];
    }
    const double target = uniform01(rng) * total;
    double running = 0.0;
    next = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      running += weight[i];
      if (running > target) {
        next = i;
        break;
      }
    }
    if (next == n) {
      // Rounding left the draw past the last positive weight.
      for (std::size_t i = n; i-- > 0;) {
        if (!chosen[i]) {
          next = i;
          break;
        }
      }
    }
  }
  return out;
}

std::vector<int> kpp_init(std::span<const ChainDescriptor> chains, int k, std::uint64_t seed,
                          const MatchParams& params) {
  std::vector<const ChainDescriptor*> ptrs;
  ptrs.reserve(chains.size());
  for (const auto& c : chains) ptrs.push_back(&c);
  std::mt19937_64 rng(seed);
  return kpp_seed(ptrs, k, rng, params).medoids;
}

std::vector<std::vector<int>> assign_by_scores(const std::vector<std::vector<double>>& scores,
                                               double th_ms) {
  const std::size_t k = scores.empty() ? 0 : scores.front().size();
  std::vector<std::vector<int>> clusters(k);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& row = scores[i];
    if (row.empty()) continue;
    const std::size_t best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    const double cut = th_ms * row[best];
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (m == best || row[m] >= cut) clusters[m].push_back(static_cast<int>(i));
    }
  }
  return clusters;
}

std::vector<std::vector<int>> assign_multi(std::span<const ChainDescriptor> chains,
                                           std::span<const ChainDescriptor> medoids, double th_ms,
                                           const MatchParams& params) {
  std::vector<std::vector<double>> scores(chains.size());
  for (std::size_t i = 0; i < chains.size(); ++i) {
    for (const auto& m : medoids) scores[i].push_back(chain_score(chains[i], m, false, params));
  }
  return assign_by_scores(scores, th_ms);
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(ChainTree& tree) : tree_(tree), store_(*tree.store), rng_(tree.seed) {}

  void build() {
    std::vector<int> all(store_.chain_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    tree_.nodes.push_back(IndexNode{});
    split(0, std::move(all));
  }

 private:
  void split(int node_id, std::vector<int> members) {
    const IndexParams& p = tree_.params;
    const int depth = tree_.nodes[node_id].depth;
    if (members.size() <= static_cast<std::size_t>(p.max_leaf) || depth >= p.max_depth) {
      tree_.nodes[node_id].members = std::move(members);
      return;
    }
    std::vector<const ChainDescriptor*> ptrs;
    ptrs.reserve(members.size());
    for (int m : members) ptrs.push_back(&store_.descriptor(static_cast<std::size_t>(m)));

    MedoidSeeding seeding = kpp_seed(ptrs, p.branching, rng_, tree_.match);
    auto clusters = assign_by_scores(seeding.scores, p.th_ms);
    for (int r = 0; r < p.refine_iterations; ++r) {
      refine(ptrs, clusters, seeding);
      clusters = assign_by_scores(seeding.scores, p.th_ms);
    }

    bool any_shrinks = false;
    for (const auto& c : clusters) any_shrinks = any_shrinks || (!c.empty() && c.size() < members.size());
    if (!any_shrinks) {
      tree_.nodes[node_id].members = std::move(members);
      return;
    }
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (clusters[c].empty()) continue;
      std::vector<int> child_members;
      child_members.reserve(clusters[c].size());
      for (int local : clusters[c]) child_members.push_back(members[static_cast<std::size_t>(local)]);
      const int child_id = static_cast<int>(tree_.nodes.size());
      IndexNode child;
      child.medoid = members[static_cast<std::size_t>(seeding.medoids[c])];
      child.depth = depth + 1;
      tree_.nodes.push_back(std::move(child));
      tree_.nodes[node_id].children.push_back(child_id);
      if (child_members.size() >= members.size()) {
        tree_.nodes[child_id].members = std::move(child_members);
      } else {
        split(child_id, std::move(child_members));
      }
    }
  }

  // One medoid update: each cluster's new medoid is the member with the
  // largest summed similarity to the rest of the cluster.
  void refine(const std::vector<const ChainDescriptor*>& ptrs,
              const std::vector<std::vector<int>>& clusters, MedoidSeeding& seeding) {
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const auto& cluster = clusters[c];
      if (cluster.empty()) continue;
      double best_total = -1.0;
      for (int candidate : cluster) {
        double total = 0.0;
        for (int other : cluster) {
          if (other != candidate) total += chain_score(*ptrs[other], *ptrs[candidate], false, tree_.match);
        }
        if (total > best_total) {
          best_total = total;
          seeding.medoids[c] = candidate;
        }
      }
    }
    for (std::size_t i = 0; i < ptrs.size(); ++i) {
      for (std::size_t c = 0; c < seeding.medoids.size(); ++c) {
        seeding.scores[i][c] = chain_score(*ptrs[i], *ptrs[seeding.medoids[c]], false, tree_.match);
      }
    }
  }

  ChainTree& tree_;
  const ChainStore& store_;
  std::mt19937_64 rng_;
};

struct FrontierEntry {
  double score;
  int node;

  bool operator<(const FrontierEntry& other) const {
    // std::priority_queue pops the largest: best score first, then lowest id.
    if (score != other.score) return score < other.score;
    return node > other.node;
  }
};

std::vector<SearchHit> sorted_hits(std::unordered_map<int, SearchHit>& by_image) {
  std::vector<SearchHit> hits;
  hits.reserve(by_image.size());
  for (auto& [image, hit] : by_image) hits.push_back(hit);
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.image < b.image;
  });
  return hits;
}

void offer(std::unordered_map<int, SearchHit>& by_image, const SearchHit& hit) {
  auto [it, inserted] = by_image.emplace(hit.image, hit);
  if (!inserted && (hit.score > it->second.score ||
                    (hit.score == it->second.score && hit.chain < it->second.chain))) {
    it->second = hit;
  }
}

}  // namespace

ChainTree build_tree(std::shared_ptr<const ChainStore> store, const IndexParams& params,
                     const MatchParams& match, std::uint64_t seed) {
  if (!store || store->chain_count() == 0) {
    throw Error(ErrorCode::invalid_input, "cannot index an empty chain store");
  }
  if (params.branching < 2 || params.max_leaf < 1 || params.max_depth < 0) {
    throw Error(ErrorCode::invalid_input, "invalid index parameters");
  }
  ChainTree tree;
  tree.store = std::move(store);
  tree.params = params;
  tree.match = match;
  tree.seed = seed;
  TreeBuilder(tree).build();
  return tree;
}

std::vector<SearchHit> search(const ChainTree& tree, const ChainDescriptor& query,
                              int target_candidates, bool query_is_sketch) {
  if (tree.empty()) return {};
  if (target_candidates < 1) throw Error(ErrorCode::invalid_input, "target_candidates must be >= 1");
  const ChainStore& store = *tree.store;
  std::unordered_map<int, SearchHit> by_image;
  std::unordered_map<int, double> scored;
  auto score_of = [&](int flat) {
    auto it = scored.find(flat);
    if (it != scored.end()) return it->second;
    const double s = chain_score(query, store.descriptor(static_cast<std::size_t>(flat)),
                                 query_is_sketch, tree.match);
    scored.emplace(flat, s);
    return s;
  };

  std::priority_queue<FrontierEntry> frontier;
  frontier.push({std::numeric_limits<double>::infinity(), 0});
  while (!frontier.empty() && by_image.size() < static_cast<std::size_t>(target_candidates)) {
    int node = frontier.top().node;
    frontier.pop();
    while (!tree.nodes[node].is_leaf()) {
      int best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int child : tree.nodes[node].children) {
        const double s = score_of(tree.nodes[child].medoid);
        if (s > best_score) {
          if (best >= 0) frontier.push({best_score, best});
          best = child;
          best_score = s;
        } else {
          frontier.push({s, child});
        }
      }
      node = best;
    }
    for (int member : tree.nodes[node].members) {
      const ChainRef ref = store.ref(static_cast<std::size_t>(member));
      offer(by_image, {ref.image, static_cast<std::size_t>(member), score_of(member)});
    }
  }
  return sorted_hits(by_image);
}

std::vector<SearchHit> exhaustive_search(const ChainStore& store, const ChainDescriptor& query,
                                         const MatchParams& params, bool query_is_sketch) {
  std::unordered_map<int, SearchHit> by_image;
  for (std::size_t i = 0; i < store.chain_count(); ++i) {
    offer(by_image, {store.ref(i).image, i, chain_score(query, store.descriptor(i), query_is_sketch, params)});
  }
  return sorted_hits(by_image);
}

}  // namespace sketchchain
