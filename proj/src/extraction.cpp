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

#include "sketchchain/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace sketchchain {

// ---------------------------------------------------------------------------
// Edge tracing

EdgeMask read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read edge mask " + path);
  auto next_token = [&in]() {
    std::string token;
    while (in >> std::ws && in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
    }
    in >> token;
    return token;
  };
  if (next_token() != "P5") throw Error(ErrorCode::format, path + ": not a binary PGM (P5)");
  EdgeMask mask;
  try {
    mask.width = std::stoi(next_token());
    mask.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (maxval <= 0 || maxval > 255) throw Error(ErrorCode::format, path + ": PGM must be 8-bit");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::format, path + ": malformed PGM header");
  }
  if (mask.width <= 0 || mask.height <= 0) throw Error(ErrorCode::format, path + ": empty PGM");
  in.get();  // single whitespace byte before the raster
  mask.pixels.resize(static_cast<std::size_t>(mask.width) * mask.height);
  in.read(reinterpret_cast<char*>(mask.pixels.data()),
          static_cast<std::streamsize>(mask.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(mask.pixels.size())) {
    throw Error(ErrorCode::format, path + ": truncated PGM raster");
  }
  return mask;
}

namespace {

constexpr int kNeighbourDx[8] = {1, 0, -1, 0, 1, -1, -1, 1};
constexpr int kNeighbourDy[8] = {0, 1, 0, -1, 1, 1, -1, -1};

// 8-connectivity where a diagonal only counts when no 4-neighbour already
// bridges the two pixels. Keeps 1-pixel-wide lines at degree 2.
std::vector<std::pair<int, int>> raster_neighbours(const EdgeMask& mask, int x, int y) {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < 8; ++k) {
    const int nx = x + kNeighbourDx[k];
    const int ny = y + kNeighbourDy[k];
    if (!mask.at(nx, ny)) continue;
    if (k >= 4 && (mask.at(nx, y) || mask.at(x, ny))) continue;
    out.emplace_back(nx, ny);
  }
  return out;
}

}  // namespace

std::vector<Polyline> trace_edge_contours(const EdgeMask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  auto id = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  std::vector<std::uint8_t> degree(mask.pixels.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y)) degree[id(x, y)] = static_cast<std::uint8_t>(raster_neighbours(mask, x, y).size());
    }
  }
  auto junction = [&](int x, int y) { return mask.at(x, y) && degree[id(x, y)] >= 3; };
  std::vector<bool> visited(mask.pixels.size(), false);
  std::vector<Polyline> out;

  auto trace_from = [&](int sx, int sy, bool closed_loop) {
    Polyline line;
    std::pair<int, int> start_junction{-1, -1};
    for (const auto& [nx, ny] : raster_neighbours(mask, sx, sy)) {
      if (junction(nx, ny)) {
        start_junction = {nx, ny};
        line.emplace_back(nx, ny);
        break;
      }
    }
    int x = sx;
    int y = sy;
    while (true) {
      visited[id(x, y)] = true;
      line.emplace_back(x, y);
      bool advanced = false;
      for (const auto& [nx, ny] : raster_neighbours(mask, x, y)) {
        if (!junction(nx, ny) && !visited[id(nx, ny)]) {
          x = nx;
          y = ny;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      std::pair<int, int> end_junction{-1, -1};
      for (const auto& [nx, ny] : raster_neighbours(mask, x, y)) {
        if (!junction(nx, ny)) continue;
        if (std::pair{nx, ny} != start_junction) {
          end_junction = {nx, ny};
          break;
        }
        if (line.size() >= 4) end_junction = {nx, ny};
      }
      if (end_junction.first >= 0) line.emplace_back(end_junction.first, end_junction.second);
      break;
    }
    if (closed_loop && line.size() >= 3) {
      const Point2 first = line.front();
      if ((first - line.back()).cwiseAbs().maxCoeff() <= 1.0) line.push_back(first);
    }
    if (line.size() >= 2) out.push_back(std::move(line));
  };

  // Open runs: start at run ends (degree ≤ 1) or next to a junction.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || junction(x, y) || visited[id(x, y)]) continue;
      bool start = degree[id(x, y)] <= 1;
      if (!start) {
        for (const auto& [nx, ny] : raster_neighbours(mask, x, y)) start = start || junction(nx, ny);
      }
      if (start) trace_from(x, y, false);
    }
  }
  // Whatever is left forms closed loops.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y) && !junction(x, y) && !visited[id(x, y)]) trace_from(x, y, true);
    }
  }
  return out;
}

std::vector<Polyline> trace_edge_contours(std::span<const Polyline> polylines) {
  std::vector<Polyline> out;
  out.reserve(polylines.size());
  for (const auto& line : polylines) {
    for (const auto& p : line) {
      if (!p.allFinite()) throw Error(ErrorCode::invalid_input, "non-finite polyline point");
    }
    Polyline clean = dedupe_consecutive(line, 0.0);
    if (clean.size() >= 2) out.push_back(std::move(clean));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature splitting

std::vector<double> curvature_profile(std::span<const Point2> points, int scale_m, double sigma,
                                      bool closed) {
  const int n = static_cast<int>(points.size());
  std::vector<double> profile(n, 0.0);
  if (n < 3 || scale_m < 1) return profile;
  std::vector<double> weights(scale_m + 1, 0.0);
  for (int i = 1; i <= scale_m; ++i) weights[i] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  const int wrap_limit = (n - 1) / 2;
  for (int c = 0; c < n; ++c) {
    double sum = 0.0;
    double norm = 0.0;
    for (int i = 1; i <= scale_m; ++i) {
      int lo = c - i;
      int hi = c + i;
      if (closed) {
        if (i > wrap_limit) break;
        lo = (lo + n) % n;
        hi = hi % n;
      } else if (lo < 0 || hi >= n) {
        break;
      }
      const double deviation = std::fabs(kPi - vertex_angle(points[lo], points[c], points[hi]));
      sum += weights[i] * deviation;
      norm += weights[i];
    }
    profile[c] = norm > 0.0 ? sum / norm : 0.0;
  }
  return profile;
}

std::vector<int> curvature_peaks(std::span<const double> profile, double threshold, bool closed) {
  constexpr double eps = 1e-9;
  const int n = static_cast<int>(profile.size());
  std::vector<int> peaks;
  if (n < 3) return peaks;
  auto value = [&](int i) {
    if (closed) return profile[static_cast<std::size_t>((i % n + n) % n)];
    if (i < 0 || i >= n) return -std::numeric_limits<double>::infinity();
    return profile[static_cast<std::size_t>(i)];
  };
  const int first = closed ? 0 : 1;
  const int last = closed ? n - 1 : n - 2;
  for (int c = first; c <= last; ++c) {
    const double v = profile[c];
    if (!(v > threshold)) continue;
    if (!(v > value(c - 1) + eps)) continue;
    if (v > value(c + 1) + eps) {
      peaks.push_back(c);
    } else if (std::fabs(v - value(c + 1)) <= eps && v > value(c + 2) + eps &&
               (closed || c + 1 <= last)) {
      // Two-sample plateau: a corner falling halfway between samples.
      peaks.push_back(c);
    }
  }
  return peaks;
}

std::vector<Polyline> curvature_split(std::span<const Point2> polyline, int scale_m, double sigma,
                                      double split_threshold) {
  if (polyline.size() < 3) return {Polyline(polyline.begin(), polyline.end())};
  const auto profile = curvature_profile(polyline, scale_m, sigma, false);
  const auto peaks = curvature_peaks(profile, split_threshold, false);
  std::vector<Polyline> pieces;
  std::size_t begin = 0;
  for (int peak : peaks) {
    pieces.emplace_back(polyline.begin() + begin, polyline.begin() + peak + 1);
    begin = static_cast<std::size_t>(peak);
  }
  pieces.emplace_back(polyline.begin() + begin, polyline.end());
  return pieces;
}

// ---------------------------------------------------------------------------
// Joint graph

std::vector<std::vector<int>> JointGraph::neighbours() const {
  std::vector<std::vector<int>> out(vertices.size());
  for (const auto& e : edges) {
    out[e.u].push_back(e.v);
    out[e.v].push_back(e.u);
  }
  for (auto& list : out) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return out;
}

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

struct CellHash {
  std::size_t operator()(const std::pair<long long, long long>& c) const {
    return std::hash<long long>()(c.first * 73856093LL ^ c.second * 19349663LL);
  }
};

// Single-linkage clusters of `points` within `radius`. Returns a cluster label
// per point, labels numbered by first occurrence.
std::vector<int> link_points(const std::vector<Point2>& points, double radius) {
  DisjointSet sets(points.size());
  if (radius > 0.0) {
    std::unordered_map<std::pair<long long, long long>, std::vector<int>, CellHash> grid;
    auto cell = [radius](const Point2& p) {
      return std::pair<long long, long long>{static_cast<long long>(std::floor(p.x() / radius)),
                                             static_cast<long long>(std::floor(p.y() / radius))};
    };
    for (int i = 0; i < static_cast<int>(points.size()); ++i) grid[cell(points[i])].push_back(i);
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
      const auto [cx, cy] = cell(points[i]);
      for (long long dx = -1; dx <= 1; ++dx) {
        for (long long dy = -1; dy <= 1; ++dy) {
          const auto it = grid.find({cx + dx, cy + dy});
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if (j > i && (points[i] - points[j]).norm() <= radius) sets.unite(i, j);
          }
        }
      }
    }
  }
  std::vector<int> label(points.size(), -1);
  std::unordered_map<int, int> root_label;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int root = sets.find(static_cast<int>(i));
    auto [it, inserted] = root_label.emplace(root, static_cast<int>(root_label.size()));
    label[i] = it->second;
  }
  return label;
}

}  // namespace

JointGraph build_joint_graph(std::span<const Polyline> segments, double merge_radius) {
  std::vector<Point2> endpoints;
  std::vector<int> segment_of;
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    const auto& seg = segments[s];
    if (seg.size() < 2 || polyline_length(seg) <= 0.0) continue;
    endpoints.push_back(seg.front());
    endpoints.push_back(seg.back());
    segment_of.push_back(s);
  }

  // Merge endpoints, then keep merging cluster centroids until no two
  // vertices lie within the radius.
  std::vector<int> owner(endpoints.size());
  std::iota(owner.begin(), owner.end(), 0);
  std::vector<Point2> vertices = endpoints;
  while (true) {
    const auto label = link_points(vertices, merge_radius);
    const int clusters = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    std::vector<Point2> sums(clusters, Point2::Zero());
    std::vector<int> counts(clusters, 0);
    for (std::size_t e = 0; e < owner.size(); ++e) {
      owner[e] = label[owner[e]];
      sums[owner[e]] += endpoints[e];
      ++counts[owner[e]];
    }
    const bool stable = clusters == static_cast<int>(vertices.size());
    vertices.assign(clusters, Point2::Zero());
    for (int c = 0; c < clusters; ++c) vertices[c] = sums[c] / counts[c];
    if (stable) break;
  }

  JointGraph graph;
  graph.vertices = vertices;
  for (std::size_t k = 0; k < segment_of.size(); ++k) {
    const int u = owner[2 * k];
    const int v = owner[2 * k + 1];
    if (u == v) continue;
    GraphEdge edge;
    edge.u = u;
    edge.v = v;
    edge.polyline = segments[segment_of[k]];
    edge.polyline.front() = vertices[u];
    edge.polyline.back() = vertices[v];
    edge.weight = polyline_length(edge.polyline);
    graph.edges.push_back(std::move(edge));
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Spanning forest

double SpanningForest::total_weight() const {
  double total = 0.0;
  for (const auto& t : trees) total += t.weight;
  return total;
}

SpanningForest max_spanning_forest(const JointGraph& graph) {
  std::vector<int> order(graph.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return graph.edges[a].weight > graph.edges[b].weight;
  });
  DisjointSet sets(graph.vertices.size());
  std::vector<int> chosen;
  for (int e : order) {
    if (sets.unite(graph.edges[e].u, graph.edges[e].v)) chosen.push_back(e);
  }
  std::sort(chosen.begin(), chosen.end());

  SpanningForest forest;
  std::unordered_map<int, int> tree_of_root;
  for (int v = 0; v < static_cast<int>(graph.vertices.size()); ++v) {
    const int root = sets.find(v);
    auto [it, inserted] = tree_of_root.emplace(root, static_cast<int>(forest.trees.size()));
    if (inserted) forest.trees.emplace_back();
    forest.trees[it->second].vertices.push_back(v);
  }
  for (int e : chosen) {
    auto& tree = forest.trees[tree_of_root[sets.find(graph.edges[e].u)]];
    tree.edges.push_back(e);
    tree.weight += graph.edges[e].weight;
  }
  return forest;
}

// ---------------------------------------------------------------------------
// Chain scoring

namespace {

struct SmoothnessContext {
  const std::vector<Point2>& vertices;
  const std::vector<std::vector<int>>& neighbours;
  double lambda_l;
  double lambda_s;

  double smooth(int a, int b, int c) const {
    return std::exp(-lambda_s * std::fabs(kPi - vertex_angle(vertices[a], vertices[b], vertices[c])));
  }

  // Share of the continuation `beyond` at `at`, for the segment (at, from),
  // among every continuation leaving `at` other than `from`.
  double share(int at, int from, int beyond) const {
    double total = 0.0;
    for (int x : neighbours[at]) {
      if (x != from) total += smooth(x, at, from);
    }
    return total > 0.0 ? smooth(beyond, at, from) / total : 0.0;
  }

  double dis(int a, int b) const { return (vertices[a] - vertices[b]).norm(); }
};

double score_path(std::span<const int> path, const SmoothnessContext& ctx) {
  double score = 0.0;
  const double half = 0.5 * ctx.lambda_l;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const int u = path[k];
    const int v = path[k + 1];
    double factor = 1.0;
    if (k > 0) factor += half * ctx.share(u, v, path[k - 1]);
    if (k + 2 < path.size()) factor += half * ctx.share(v, u, path[k + 2]);
    score += ctx.dis(u, v) * factor;
  }
  return score;
}

}  // namespace

double score_chain(std::span<const int> path, const JointGraph& graph, double lambda_l,
                   double lambda_s) {
  const auto neighbours = graph.neighbours();
  SmoothnessContext ctx{graph.vertices, neighbours, lambda_l, lambda_s};
  return score_path(path, ctx);
}

namespace {

// Rooted view of one spanning tree with binary-lifting ancestors and root
// prefix sums of the per-vertex chain-score contributions.
struct RootedTree {
  std::vector<int> parent;
  std::vector<int> parent_edge;
  std::vector<int> depth;
  std::vector<double> prefix;
  std::vector<std::vector<int>> up;
  std::vector<int> leaves;

  int ancestor(int v, int levels) const {
    for (int k = 0; levels > 0; ++k, levels >>= 1) {
      if (levels & 1) v = up[k][v];
    }
    return v;
  }

  int lca(int a, int b) const {
    if (depth[a] < depth[b]) std::swap(a, b);
    a = ancestor(a, depth[a] - depth[b]);
    if (a == b) return a;
    for (int k = static_cast<int>(up.size()) - 1; k >= 0; --k) {
      if (up[k][a] != up[k][b]) {
        a = up[k][a];
        b = up[k][b];
      }
    }
    return parent[a];
  }
};

RootedTree root_tree(const SpanningTree& tree, const JointGraph& graph,
                     const SmoothnessContext& ctx) {
  const std::size_t n = graph.vertices.size();
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (int e : tree.edges) {
    adj[graph.edges[e].u].emplace_back(graph.edges[e].v, e);
    adj[graph.edges[e].v].emplace_back(graph.edges[e].u, e);
  }
  RootedTree rt;
  rt.parent.assign(n, -1);
  rt.parent_edge.assign(n, -1);
  rt.depth.assign(n, 0);
  rt.prefix.assign(n, 0.0);

  int root = -1;
  for (int v : tree.vertices) {
    if (adj[v].size() == 1) rt.leaves.push_back(v);
    if (root < 0 && adj[v].size() >= 2) root = v;
  }
  if (root < 0) root = rt.leaves.front();

  const double half = 0.5 * ctx.lambda_l;
  std::queue<int> bfs;
  bfs.push(root);
  rt.parent[root] = root;
  while (!bfs.empty()) {
    const int c = bfs.front();
    bfs.pop();
    for (const auto& [d, e] : adj[c]) {
      if (rt.parent[d] >= 0) continue;
      rt.parent[d] = c;
      rt.parent_edge[d] = e;
      rt.depth[d] = rt.depth[c] + 1;
      if (rt.depth[d] >= 2) {
        const int p = rt.parent[c];
        const double val = ctx.dis(c, d) * (1.0 + half * ctx.share(c, d, p)) +
                           ctx.dis(p, c) * half * ctx.share(c, p, d);
        rt.prefix[d] = rt.prefix[c] + val;
      }
      bfs.push(d);
    }
  }

  int max_depth = 0;
  for (int v : tree.vertices) max_depth = std::max(max_depth, rt.depth[v]);
  int levels = 1;
  while ((1 << levels) <= max_depth) ++levels;
  rt.up.assign(levels, std::vector<int>(n, root));
  for (int v : tree.vertices) rt.up[0][v] = rt.parent[v];
  for (int k = 1; k < levels; ++k) {
    for (int v : tree.vertices) rt.up[k][v] = rt.up[k - 1][rt.up[k - 1][v]];
  }
  return rt;
}

struct Candidate {
  double score;
  int tree;
  int from;
  int to;
};

std::vector<int> tree_path(const RootedTree& rt, int a, int b) {
  const int meet = rt.lca(a, b);
  std::vector<int> left;
  for (int v = a; v != meet; v = rt.parent[v]) left.push_back(v);
  left.push_back(meet);
  std::vector<int> right;
  for (int v = b; v != meet; v = rt.parent[v]) right.push_back(v);
  left.insert(left.end(), right.rbegin(), right.rend());
  return left;
}

std::vector<int> path_edges(const RootedTree& rt, const std::vector<int>& path) {
  std::vector<int> edges;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const int a = path[k];
    const int b = path[k + 1];
    edges.push_back(rt.parent[a] == b ? rt.parent_edge[a] : rt.parent_edge[b]);
  }
  return edges;
}

double edges_length(const std::vector<int>& edges, const JointGraph& graph) {
  double total = 0.0;
  for (int e : edges) total += graph.edges[e].weight;
  return total;
}

double shared_length(const std::vector<int>& a, const std::vector<int>& b,
                     const JointGraph& graph) {
  std::vector<int> sa = a;
  std::vector<int> sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<int> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
  return edges_length(common, graph);
}

}  // namespace

double chain_overlap(const ScoredChain& a, const ScoredChain& b, const JointGraph& graph) {
  const double shorter = std::min(edges_length(a.edge_path, graph), edges_length(b.edge_path, graph));
  if (!(shorter > 0.0)) return 0.0;
  return shared_length(a.edge_path, b.edge_path, graph) / shorter;
}

std::vector<ScoredChain> extract_top_chains(const SpanningForest& forest, const JointGraph& graph,
                                            int n_oc, double overlap_threshold, double lambda_l,
                                            double lambda_s) {
  const auto neighbours = graph.neighbours();
  SmoothnessContext ctx{graph.vertices, neighbours, lambda_l, lambda_s};
  const double half = 0.5 * lambda_l;

  std::vector<RootedTree> rooted(forest.trees.size());
  std::vector<Candidate> candidates;
  for (int t = 0; t < static_cast<int>(forest.trees.size()); ++t) {
    const auto& tree = forest.trees[t];
    if (tree.edges.empty()) continue;
    rooted[t] = root_tree(tree, graph, ctx);
    const RootedTree& rt = rooted[t];
    const auto& leaves = rt.leaves;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      for (std::size_t j = i + 1; j < leaves.size(); ++j) {
        int a = leaves[i];
        int b = leaves[j];
        const int meet = rt.lca(a, b);
        if (meet == b) std::swap(a, b);
        // a may be the meeting vertex only when the root itself is a leaf.
        const int yb = rt.ancestor(b, rt.depth[b] - rt.depth[meet] - 1);
        double score = rt.prefix[b] - rt.prefix[yb];
        if (a == meet) {
          score += ctx.dis(meet, yb);
        } else {
          const int xa = rt.ancestor(a, rt.depth[a] - rt.depth[meet] - 1);
          score += rt.prefix[a] - rt.prefix[xa];
          score += ctx.dis(meet, xa) * (1.0 + half * ctx.share(meet, xa, yb));
          score += ctx.dis(meet, yb) * (1.0 + half * ctx.share(meet, yb, xa));
        }
        candidates.push_back({score, t, leaves[i], leaves[j]});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) { return x.score > y.score; });

  std::vector<ScoredChain> selected;
  std::vector<int> covered;  // union of the selected chains' edges
  for (const auto& cand : candidates) {
    if (static_cast<int>(selected.size()) >= n_oc) break;
    ScoredChain chain;
    chain.score = cand.score;
    chain.vertex_path = tree_path(rooted[cand.tree], cand.from, cand.to);
    chain.edge_path = path_edges(rooted[cand.tree], chain.vertex_path);
    const double length = edges_length(chain.edge_path, graph);
    bool accept = length > 0.0;
    for (const auto& kept : selected) {
      if (!accept) break;
      accept = chain_overlap(chain, kept, graph) < overlap_threshold;
    }
    if (accept && !covered.empty()) {
      accept = shared_length(chain.edge_path, covered, graph) / length < overlap_threshold;
    }
    if (!accept) continue;
    Polyline joints;
    for (int v : chain.vertex_path) joints.push_back(graph.vertices[v]);
    chain.chain = make_chain("", "", ChainSource::csn, std::move(joints));
    covered.insert(covered.end(), chain.edge_path.begin(), chain.edge_path.end());
    selected.push_back(std::move(chain));
  }
  return selected;
}

// ---------------------------------------------------------------------------
// Region boundaries and full extraction

std::vector<Chain> ingest_region_boundaries(std::span<const RegionProposal> proposals,
                                            double frame_width, double frame_height,
                                            const ExtractionParams& params) {
  std::vector<Chain> chains;
  const std::size_t limit = std::min<std::size_t>(proposals.size(), static_cast<std::size_t>(params.n_gop));
  for (std::size_t r = 0; r < limit; ++r) {
    Polyline ring = dedupe_consecutive(proposals[r].boundary);
    if (ring.size() >= 2 && (ring.front() - ring.back()).norm() <= 1e-9) ring.pop_back();
    if (ring.size() < 3) continue;
    ring.push_back(ring.front());
    if (polyline_length(ring) < params.min_perimeter) continue;

    const Polyline dense = resample_polyline(ring, 1.0);
    std::size_t near_border = 0;
    for (const auto& p : dense) {
      const double gap = std::min({p.x(), p.y(), frame_width - p.x(), frame_height - p.y()});
      if (gap <= params.border_margin) ++near_border;
    }
    if (2 * near_border > dense.size()) continue;

    Polyline cyclic = resample_polyline(ring, params.resample_step);
    if ((cyclic.front() - cyclic.back()).norm() <= 1e-9) cyclic.pop_back();
    const auto profile = curvature_profile(cyclic, params.scale_m, params.sigma, true);
    const auto peaks = curvature_peaks(profile, params.split_threshold, true);
    if (peaks.size() < 3) continue;
    std::size_t sharpest = 0;
    for (std::size_t k = 1; k < peaks.size(); ++k) {
      if (profile[peaks[k]] > profile[peaks[sharpest]]) sharpest = k;
    }
    Polyline joints;
    for (std::size_t k = 0; k <= peaks.size(); ++k) {
      joints.push_back(cyclic[peaks[(sharpest + k) % peaks.size()]]);
    }
    chains.push_back(make_chain("", "", ChainSource::region, std::move(joints)));
  }
  return chains;
}

std::vector<ScoredChain> chain_polylines(std::span<const Polyline> polylines,
                                         const ExtractionParams& params) {
  std::vector<Polyline> pieces;
  for (const auto& line : trace_edge_contours(polylines)) {
    const Polyline dense = resample_polyline(line, params.resample_step);
    if (dense.size() < 2) continue;
    for (auto& piece : curvature_split(dense, params.scale_m, params.sigma, params.split_threshold)) {
      pieces.push_back(std::move(piece));
    }
  }
  const JointGraph graph = build_joint_graph(pieces, params.merge_radius);
  const SpanningForest forest = max_spanning_forest(graph);
  return extract_top_chains(forest, graph, params.n_oc, params.overlap_threshold, params.lambda_l,
                            params.lambda_s);
}

std::vector<Chain> extract_image_chains(const std::string& image_id,
                                        std::span<const Polyline> polylines,
                                        std::span<const RegionProposal> regions,
                                        double frame_width, double frame_height,
                                        const ExtractionParams& params) {
  std::vector<Chain> out;
  int csn = 0;
  for (auto& scored : chain_polylines(polylines, params)) {
    if (scored.chain.joints.size() < 3) continue;
    Chain chain = std::move(scored.chain);
    chain.image_id = image_id;
    chain.chain_id = "csn-" + std::to_string(csn++);
    out.push_back(std::move(chain));
  }
  int gop = 0;
  for (auto& chain : ingest_region_boundaries(regions, frame_width, frame_height, params)) {
    chain.image_id = image_id;
    chain.chain_id = "gop-" + std::to_string(gop++);
    out.push_back(std::move(chain));
  }
  return out;
}

}  // namespace sketchchain
