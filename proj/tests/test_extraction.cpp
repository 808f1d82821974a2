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

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

using namespace sketchchain;
namespace ts = sketchchain::testsupport;

namespace {

EdgeMask blank(int w, int h) { return EdgeMask{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)}; }

void set(EdgeMask& m, int x, int y) { m.pixels[static_cast<std::size_t>(y) * m.width + x] = 255; }

GraphEdge straight(const JointGraph& g, int u, int v) {
  GraphEdge e;
  e.u = u;
  e.v = v;
  e.polyline = {g.vertices[u], g.vertices[v]};
  e.weight = (g.vertices[u] - g.vertices[v]).norm();
  return e;
}

JointGraph graph_of(std::vector<Point2> vertices, const std::vector<std::pair<int, int>>& edges) {
  JointGraph g;
  g.vertices = std::move(vertices);
  for (const auto& [u, v] : edges) g.edges.push_back(straight(g, u, v));
  return g;
}

JointGraph weighted(int n, const std::vector<std::tuple<int, int, double>>& edges) {
  JointGraph g;
  for (int i = 0; i < n; ++i) g.vertices.emplace_back(10.0 * i, 0.0);
  for (const auto& [u, v, w] : edges) {
    GraphEdge e = straight(g, u, v);
    e.weight = w;
    g.edges.push_back(e);
  }
  return g;
}

// Random connected graph: a random tree plus a few chords.
JointGraph random_graph(std::mt19937_64& rng, int n, int chords) {
  JointGraph g;
  for (int i = 0; i < n; ++i) g.vertices.emplace_back(ts::uniform(rng, 0, 200), ts::uniform(rng, 0, 200));
  std::set<std::pair<int, int>> used;
  for (int i = 1; i < n; ++i) {
    const int j = ts::uniform_int(rng, 0, i - 1);
    used.insert({j, i});
    g.edges.push_back(straight(g, j, i));
  }
  for (int c = 0; c < chords; ++c) {
    int a = ts::uniform_int(rng, 0, n - 1);
    int b = ts::uniform_int(rng, 0, n - 1);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!used.insert({a, b}).second) continue;
    g.edges.push_back(straight(g, a, b));
  }
  return g;
}

}  // namespace

TEST_CASE("polyline input passes through tracing") {
  const std::vector<Polyline> in{{Point2(0, 0), Point2(10, 0), Point2(10, 10)}};
  const auto out = trace_edge_contours(in);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == in[0]);
}

TEST_CASE("a horizontal run of 20 pixels traces to one 20-point polyline") {
  EdgeMask m = blank(30, 5);
  for (int x = 3; x < 23; ++x) set(m, x, 2);
  const auto out = trace_edge_contours(m);
  REQUIRE(out.size() == 1);
  CHECK(out[0].size() == 20);
  CHECK(out[0].front() == Point2(3, 2));
  CHECK(out[0].back() == Point2(22, 2));
}

TEST_CASE("a plus sign traces to four polylines meeting at the center") {
  EdgeMask m = blank(21, 21);
  for (int k = 5; k <= 15; ++k) {
    set(m, k, 10);
    set(m, 10, k);
  }
  const auto out = trace_edge_contours(m);
  REQUIRE(out.size() == 4);
  for (const auto& line : out) {
    CHECK(line.size() == 6);
    const bool touches = line.front() == Point2(10, 10) || line.back() == Point2(10, 10);
    CHECK(touches);
  }
}

TEST_CASE("a diagonal line is one polyline and a ring closes") {
  EdgeMask m = blank(20, 20);
  for (int k = 2; k < 12; ++k) set(m, k, k);
  auto out = trace_edge_contours(m);
  REQUIRE(out.size() == 1);
  CHECK(out[0].size() == 10);

  EdgeMask ring = blank(20, 20);
  for (int k = 4; k <= 12; ++k) {
    set(ring, k, 4);
    set(ring, k, 12);
    set(ring, 4, k);
    set(ring, 12, k);
  }
  out = trace_edge_contours(ring);
  REQUIRE(out.size() == 1);
  CHECK(out[0].front() == out[0].back());
  CHECK(out[0].size() == 33);
}

TEST_CASE("read_pgm reads binary PGM and rejects other data") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = dir / "sketchchain_mask.pgm";
  {
    std::ofstream out(good, std::ios::binary);
    out << "P5\n# edges\n4 2\n255\n";
    const unsigned char px[8] = {0, 255, 0, 0, 0, 0, 9, 0};
    out.write(reinterpret_cast<const char*>(px), 8);
  }
  const EdgeMask m = read_pgm(good.string());
  CHECK(m.width == 4);
  CHECK(m.height == 2);
  CHECK(m.at(1, 0));
  CHECK(m.at(2, 1));
  CHECK_FALSE(m.at(0, 0));

  const auto bad = dir / "sketchchain_mask_bad.pgm";
  {
    std::ofstream out(bad, std::ios::binary);
    out << "P2\n4 2\n255\n0 0 0 0 0 0 0 0\n";
  }
  CHECK_THROWS_AS(read_pgm(bad.string()), Error);
  {
    std::ofstream out(bad, std::ios::binary);
    out << "P5\n4 2\n255\nab";
  }
  CHECK_THROWS_AS(read_pgm(bad.string()), Error);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST_CASE("curvature split on simple shapes") {
  Polyline line;
  for (int i = 0; i < 20; ++i) line.emplace_back(i, 0.5 * i);
  CHECK(curvature_split(line, 5, 2.0, 0.4).size() == 1);
  for (double k : curvature_profile(line, 5, 2.0)) CHECK(k == doctest::Approx(0.0));

  const Polyline l = ts::densify({Point2(0, 0), Point2(20, 0), Point2(20, 20)}, 1.0);
  REQUIRE(l.size() == 41);
  const auto pieces = curvature_split(l, 5, 2.0, 0.4);
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].back() == Point2(20, 0));
  CHECK(pieces[1].front() == Point2(20, 0));

  Polyline circle;
  for (int i = 0; i < 64; ++i) circle.emplace_back(50 * std::cos(i * kTwoPi / 64), 50 * std::sin(i * kTwoPi / 64));
  const auto profile = curvature_profile(circle, 5, 2.0, true);
  CHECK(curvature_peaks(profile, profile[0] + 0.1, true).empty());
  CHECK(curvature_peaks(profile, 0.0, true).empty());
}

TEST_CASE("a corner between two samples splits once") {
  // Corner at (10, 0) falls midway between samples 1 apart.
  Polyline l;
  for (int i = 0; i <= 9; ++i) l.emplace_back(i + 0.5, 0);
  for (int i = 0; i <= 9; ++i) l.emplace_back(10, i + 0.5);
  const auto pieces = curvature_split(l, 5, 2.0, 0.4);
  CHECK(pieces.size() == 2);
}

TEST_CASE("curvature split pieces concatenate back to the input") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Polyline dense = resample_polyline(ts::random_chain(rng, ts::uniform_int(rng, 3, 9)), 2.0);
    const auto pieces = curvature_split(dense, 5, 2.0, 0.4);
    Polyline joined = pieces.front();
    for (std::size_t k = 1; k < pieces.size(); ++k) {
      CHECK(pieces[k].front() == joined.back());
      joined.insert(joined.end(), pieces[k].begin() + 1, pieces[k].end());
    }
    REQUIRE(joined.size() == dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) CHECK(joined[i] == dense[i]);
  }
}

TEST_CASE("joint graph merging") {
  const std::vector<Polyline> shared{{Point2(0, 0), Point2(10, 0)}, {Point2(10, 0), Point2(10, 10)}};
  auto g = build_joint_graph(shared, 3.0);
  CHECK(g.vertices.size() == 3);
  CHECK(g.edges.size() == 2);

  const std::vector<Polyline> near{{Point2(0, 0), Point2(10, 0)}, {Point2(11, 0), Point2(30, 0)}};
  g = build_joint_graph(near, 3.0);
  REQUIRE(g.vertices.size() == 3);
  bool midpoint = false;
  for (const auto& v : g.vertices) midpoint = midpoint || v.isApprox(Point2(10.5, 0));
  CHECK(midpoint);
  CHECK(g.edges[0].polyline.back().isApprox(Point2(10.5, 0)));
  CHECK(g.edges[0].weight == doctest::Approx(10.5));

  const std::vector<Polyline> far{{Point2(0, 0), Point2(10, 0)}, {Point2(20, 0), Point2(30, 0)}};
  g = build_joint_graph(far, 3.0);
  CHECK(g.vertices.size() == 4);
  CHECK(max_spanning_forest(g).trees.size() == 2);
}

TEST_CASE("joint graph invariants on random segments") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Polyline> segments;
    for (int s = 0; s < 30; ++s) {
      const Point2 a(ts::uniform(rng, 0, 60), ts::uniform(rng, 0, 60));
      segments.push_back({a, a + Point2(ts::uniform(rng, -20, 20), ts::uniform(rng, -20, 20))});
    }
    const auto g = build_joint_graph(segments, 3.0);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
      for (std::size_t j = i + 1; j < g.vertices.size(); ++j) CHECK((g.vertices[i] - g.vertices[j]).norm() > 3.0);
    }
    for (const auto& e : g.edges) {
      CHECK(e.weight > 0.0);
      CHECK(e.weight == doctest::Approx(polyline_length(e.polyline)));
      CHECK(e.polyline.front() == g.vertices[e.u]);
      CHECK(e.polyline.back() == g.vertices[e.v]);
    }
  }
}

TEST_CASE("maximum spanning forest examples") {
  const auto path = weighted(4, {{0, 1, 2.0}, {1, 2, 3.0}, {2, 3, 1.0}});
  auto f = max_spanning_forest(path);
  REQUIRE(f.trees.size() == 1);
  CHECK(f.trees[0].edges == std::vector<int>{0, 1, 2});

  const auto triangle = weighted(3, {{0, 1, 5.0}, {1, 2, 4.0}, {0, 2, 1.0}});
  f = max_spanning_forest(triangle);
  CHECK(f.trees[0].edges == std::vector<int>{0, 1});
  CHECK(f.total_weight() == 9.0);

  const auto two = weighted(6, {{0, 1, 5.0}, {1, 2, 4.0}, {0, 2, 1.0}, {3, 4, 2.0}, {4, 5, 7.0}, {3, 5, 6.0}});
  f = max_spanning_forest(two);
  REQUIRE(f.trees.size() == 2);
  CHECK(f.trees[0].edges == std::vector<int>{0, 1});
  CHECK(f.trees[1].edges == std::vector<int>{4, 5});
}

TEST_CASE("maximum spanning forest beats every other forest") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = ts::uniform_int(rng, 3, 7);
    std::vector<std::tuple<int, int, double>> edges;
    const int e = ts::uniform_int(rng, 2, 8);
    for (int k = 0; k < e; ++k) {
      const int u = ts::uniform_int(rng, 0, n - 1);
      int v = ts::uniform_int(rng, 0, n - 2);
      if (v >= u) ++v;
      edges.emplace_back(u, v, std::round(ts::uniform(rng, 1, 6)));
    }
    const auto g = weighted(n, edges);
    CHECK(max_spanning_forest(g).total_weight() == doctest::Approx(ts::brute_force_max_forest(g)));
  }
}

TEST_CASE("chain score examples") {
  const auto single = graph_of({Point2(0, 0), Point2(40, 0)}, {{0, 1}});
  const std::vector<int> one{0, 1};
  CHECK(score_chain(one, single, 1.0, 2.0) == doctest::Approx(40.0));

  const auto straight3 = graph_of({Point2(0, 0), Point2(10, 0), Point2(20, 0)}, {{0, 1}, {1, 2}});
  const std::vector<int> path{0, 1, 2};
  CHECK(score_chain(path, straight3, 1.0, 2.0) == doctest::Approx(20.0 * 1.5));

  const auto junction =
      graph_of({Point2(0, 0), Point2(10, 0), Point2(20, 0), Point2(10, 10)}, {{0, 1}, {1, 2}, {1, 3}});
  const double share = 1.0 / (1.0 + std::exp(-kPi));
  CHECK(share == doctest::Approx(0.9586).epsilon(1e-4));
  CHECK(score_chain(path, junction, 1.0, 2.0) == doctest::Approx(20.0 + 10.0 * share));
}

TEST_CASE("chain score does not depend on direction") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(rng, 12, 4);
    const auto forest = max_spanning_forest(g);
    const auto& tree = forest.trees[0];
    const int a = ts::uniform_int(rng, 0, 11);
    int b = ts::uniform_int(rng, 0, 10);
    if (b >= a) ++b;
    auto path = ts::tree_vertex_path(tree, g, a, b);
    const double forward = score_chain(path, g, 1.0, 2.0);
    std::reverse(path.begin(), path.end());
    CHECK(score_chain(path, g, 1.0, 2.0) == doctest::Approx(forward).epsilon(1e-12));
  }
}

TEST_CASE("top chains on small trees") {
  const auto path = graph_of({Point2(0, 0), Point2(10, 0), Point2(20, 5), Point2(30, 0)}, {{0, 1}, {1, 2}, {2, 3}});
  auto chains = extract_top_chains(max_spanning_forest(path), path, 5, 0.6, 1.0, 2.0);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].vertex_path == std::vector<int>{0, 1, 2, 3});
  CHECK(chains[0].chain.joints.size() == 4);

  // Three equal arms at 120 degrees.
  std::vector<Point2> star{Point2(0, 0)};
  for (int k = 0; k < 3; ++k) star.push_back(20.0 * Point2(std::cos(k * kTwoPi / 3), std::sin(k * kTwoPi / 3)));
  const auto tri = graph_of(star, {{0, 1}, {0, 2}, {0, 3}});
  chains = extract_top_chains(max_spanning_forest(tri), tri, 5, 0.6, 1.0, 2.0);
  CHECK(chains.size() == 2);

  // Long stem from the left, one straight and one sharply bent arm.
  const auto y = graph_of({Point2(0, 0), Point2(50, 0), Point2(65, 2), Point2(55, 14)}, {{0, 1}, {1, 2}, {1, 3}});
  chains = extract_top_chains(max_spanning_forest(y), y, 1, 0.6, 1.0, 2.0);
  REQUIRE(chains.size() == 1);
  std::vector<int> best = chains[0].vertex_path;
  if (best.front() > best.back()) std::reverse(best.begin(), best.end());
  CHECK(best == std::vector<int>{0, 1, 2});
}

TEST_CASE("top chains agree with brute-force leaf-pair scoring") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = random_graph(rng, ts::uniform_int(rng, 3, 14), 3);
    const auto forest = max_spanning_forest(g);
    const auto chains = extract_top_chains(forest, g, 5, 0.6, 1.0, 2.0);
    REQUIRE_FALSE(chains.empty());

    const auto& tree = forest.trees[0];
    std::vector<int> degree(g.vertices.size(), 0);
    for (int e : tree.edges) {
      ++degree[g.edges[e].u];
      ++degree[g.edges[e].v];
    }
    double best = 0.0;
    for (int a : tree.vertices) {
      for (int b : tree.vertices) {
        if (a < b && degree[a] == 1 && degree[b] == 1) {
          best = std::max(best, score_chain(ts::tree_vertex_path(tree, g, a, b), g, 1.0, 2.0));
        }
      }
    }
    CHECK(chains[0].score == doctest::Approx(best).epsilon(1e-10));
    for (std::size_t i = 0; i < chains.size(); ++i) {
      const auto& c = chains[i];
      CHECK(c.score == doctest::Approx(score_chain(c.vertex_path, g, 1.0, 2.0)).epsilon(1e-10));
      const std::set<int> distinct(c.vertex_path.begin(), c.vertex_path.end());
      CHECK(distinct.size() == c.vertex_path.size());
      CHECK(degree[c.vertex_path.front()] == 1);
      CHECK(degree[c.vertex_path.back()] == 1);
      if (i > 0) CHECK(c.score <= chains[i - 1].score);
      for (std::size_t j = 0; j < i; ++j) CHECK(chain_overlap(c, chains[j], g) < 0.6);
    }
  }
}

TEST_CASE("region boundaries") {
  const ExtractionParams params;
  const RegionProposal square{{Point2(78, 78), Point2(178, 78), Point2(178, 178), Point2(78, 178)}, 1.0};
  auto chains = ingest_region_boundaries(std::span(&square, 1), 256, 256, params);
  REQUIRE(chains.size() == 1);
  const auto& joints = chains[0].joints;
  REQUIRE(joints.size() == 5);
  CHECK(joints.front() == joints.back());
  CHECK(chains[0].source == ChainSource::region);
  for (std::size_t i = 0; i < 4; ++i) {
    bool corner = false;
    for (const auto& c : square.boundary) corner = corner || (joints[i] - c).norm() < 1e-9;
    CHECK(corner);
  }

  const RegionProposal hugging{{Point2(2, 2), Point2(254, 2), Point2(254, 200), Point2(2, 200)}, 1.0};
  CHECK(ingest_region_boundaries(std::span(&hugging, 1), 256, 256, params).empty());

  const RegionProposal tiny{{Point2(100, 100), Point2(108, 100), Point2(108, 108), Point2(100, 108)}, 1.0};
  CHECK(ingest_region_boundaries(std::span(&tiny, 1), 256, 256, params).empty());

  std::vector<RegionProposal> many;
  for (int k = 0; k < 25; ++k) {
    const Point2 o(20 + 40 * (k % 5), 20 + 40 * (k / 5));
    many.push_back({{o, o + Point2(24, 0), o + Point2(24, 24), o + Point2(0, 24)}, 25.0 - k});
  }
  CHECK(ingest_region_boundaries(many, 256, 256, params).size() == 20);
}

TEST_CASE("image chains from polylines and regions") {
  const Polyline outline = ts::densify({Point2(40, 40), Point2(120, 40), Point2(120, 100), Point2(60, 120),
                                        Point2(60, 200), Point2(200, 180)},
                                       1.0);
  const std::vector<Polyline> polylines{outline};
  const std::vector<RegionProposal> regions{
      {{Point2(150, 40), Point2(220, 40), Point2(220, 120), Point2(150, 120)}, 0.9}};
  const auto chains = extract_image_chains("img-7", polylines, regions, 256, 256, ExtractionParams{});
  REQUIRE(chains.size() == 2);
  CHECK(chains[0].image_id == "img-7");
  CHECK(chains[0].chain_id == "csn-0");
  CHECK(chains[0].joints.size() == 6);
  CHECK(chains[1].chain_id == "gop-0");
  CHECK(chains[1].joints.size() == 5);
}
