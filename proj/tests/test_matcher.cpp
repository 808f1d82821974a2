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

#include "sketchchain/descriptor.hpp"
#include "sketchchain/matcher.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

#include <Eigen/LU>

using namespace sketchchain;
namespace ts = sketchchain::testsupport;

namespace {

ChainDescriptor random_features(std::mt19937_64& rng, int n) {
  std::vector<double> g(n), t(n), w(n);
  for (int i = 0; i < n; ++i) {
    g[i] = std::exp(ts::uniform(rng, -1.5, 1.5));
    t[i] = ts::uniform(rng, 0, kTwoPi);
    w[i] = ts::uniform(rng, 0.05, 1.5);
  }
  return descriptor_from_features(g, t, w);
}

// Random descriptor pair that shares a stretch of features, so matchings
// with skips are common.
std::pair<ChainDescriptor, ChainDescriptor> related_pair(std::mt19937_64& rng, int max_joints) {
  const auto a = random_features(rng, ts::uniform_int(rng, 1, max_joints));
  std::vector<double> g, t, w;
  const int n = ts::uniform_int(rng, 1, max_joints);
  for (int j = 0; j < n; ++j) {
    const int src = ts::uniform_int(rng, 0, static_cast<int>(a.size()) - 1);
    const bool copy = rng() % 3 != 0;
    g.push_back(copy ? a.gammas[src] * std::exp(ts::uniform(rng, -0.1, 0.1)) : std::exp(ts::uniform(rng, -1.5, 1.5)));
    t.push_back(copy ? a.thetas[src] + ts::uniform(rng, -0.1, 0.1) : ts::uniform(rng, 0, kTwoPi));
    w.push_back(ts::uniform(rng, 0.05, 1.5));
  }
  return {a, descriptor_from_features(g, t, w)};
}

}  // namespace

TEST_CASE("ratio similarity and joint scores") {
  const MatchParams p;
  CHECK(ratio_similarity(3, 3) == 1.0);
  CHECK(ratio_similarity(2, 4) == 0.5);
  CHECK(ratio_similarity(0.1, 10) == doctest::Approx(0.01));
  CHECK_THROWS_AS(ratio_similarity(0, 1), Error);

  CHECK(joint_score(1.3, 2.0, 1.3, 2.0, p) == 1.0);
  CHECK(std::fabs(joint_score(1.0, kPi / 2, 1.0, kPi, p) - std::exp(-kPi)) <= 1e-12);
  CHECK(std::fabs(length_ratio_score(1.0, 2.0, p) - std::exp(-0.25)) <= 1e-12);
  CHECK(std::fabs(angle_score(0.1, kTwoPi - 0.1, p) - std::exp(-0.4)) <= 1e-12);
  CHECK(joint_score(0.7, 1.0, 1.1, 2.5, p) ==
        doctest::Approx(ts::oracle_joint_score(0.7, 1.0, 1.1, 2.5, p)).epsilon(1e-14));
}

TEST_CASE("identical descriptors match completely") {
  const std::vector<double> g{1.5, 0.6, 2.0, 1.0};
  const std::vector<double> t{1.0, 4.0, 2.0, 5.0};
  const std::vector<double> w{0.5, 0.6, 0.7, 0.8};
  const auto a = descriptor_from_features(g, t, w);
  const auto m = dp_match(a, a, 0.03, 0.03, MatchParams{});
  CHECK(m.cms == doctest::Approx(4.0));
  CHECK(m.pairs.size() == 4);
  CHECK(m.skipped_a.empty());
  CHECK(m.skipped_b.empty());
}

TEST_CASE("an inserted shallow joint is skipped at its weighted cost") {
  const std::vector<double> g{1.5, 0.6, 2.0, 1.0};
  const std::vector<double> t{1.0, 4.0, 2.0, 5.0};
  const std::vector<double> w{0.5, 0.6, 0.7, 0.8};
  const auto a = descriptor_from_features(g, t, w);
  // The inserted joint looks nothing like its neighbours.
  const std::vector<double> g2{1.5, 0.6, 0.12, 2.0, 1.0};
  const std::vector<double> t2{1.0, 4.0, 5.9, 2.0, 5.0};
  const std::vector<double> w2{0.5, 0.6, 0.1, 0.7, 0.8};
  const auto b = descriptor_from_features(g2, t2, w2);
  const auto m = dp_match(a, b, 0.07, 0.03, MatchParams{});
  CHECK(m.cms == doctest::Approx(4.0 - 0.003).epsilon(1e-12));
  CHECK(m.skipped_b == std::vector<int>{2});
  CHECK(m.skipped_a.empty());
  CHECK(m.pairs == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 3}, {3, 4}});
}

TEST_CASE("dp_match equals brute-force enumeration") {
  std::mt19937_64 rng(59);
  const MatchParams p;
  for (int trial = 0; trial < 300; ++trial) {
    const auto [a, b] = related_pair(rng, 7);
    for (auto v : kAllVariants) {
      const auto bv = variant_descriptor(b, v);
      const auto m = dp_match(a, bv, 0.07, 0.03, p);
      CHECK(std::fabs(m.cms - ts::brute_force_cms(a, bv, 0.07, 0.03, p)) <= 1e-9);
    }
  }
}

TEST_CASE("alignment structure") {
  std::mt19937_64 rng(61);
  const MatchParams p;
  for (int trial = 0; trial < 300; ++trial) {
    const auto [a, b] = related_pair(rng, 10);
    const auto m = chain_similarity(a, b, true, p);
    CHECK(m.cms >= 0.0);
    CHECK(m.cms <= static_cast<double>(std::min(a.size(), b.size())) + 1e-12);
    CHECK(std::fabs(m.score - m.gac * m.cms) <= 1e-12);
    CHECK(m.gac > 0.0);
    CHECK(m.gac <= 1.0);

    double best_single = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        best_single = std::max(best_single, joint_score(a.gammas[i], a.thetas[i], b.gammas[j], b.thetas[j], p));
      }
    }
    CHECK(m.cms >= best_single - 1e-12);

    REQUIRE_FALSE(m.pairs.empty());
    for (std::size_t k = 1; k < m.pairs.size(); ++k) {
      CHECK(m.pairs[k].first > m.pairs[k - 1].first);
      CHECK(m.pairs[k].second > m.pairs[k - 1].second);
    }
    // Matched plus skipped joints cover each span without gaps.
    std::set<int> in_a(m.skipped_a.begin(), m.skipped_a.end());
    std::set<int> in_b(m.skipped_b.begin(), m.skipped_b.end());
    for (const auto& [x, y] : m.pairs) {
      in_a.insert(x);
      in_b.insert(y);
    }
    CHECK(*in_a.rbegin() - *in_a.begin() + 1 == static_cast<int>(in_a.size()));
    CHECK(*in_b.rbegin() - *in_b.begin() + 1 == static_cast<int>(in_b.size()));
    CHECK(m.pairs.size() + m.skipped_a.size() == in_a.size());
  }
}

TEST_CASE("raising a skip weight never raises CMS") {
  std::mt19937_64 rng(67);
  const MatchParams p;
  for (int trial = 0; trial < 300; ++trial) {
    auto [a, b] = related_pair(rng, 9);
    const double before = dp_match(a, b, 0.07, 0.03, p).cms;
    auto& target = rng() & 1 ? a : b;
    const std::size_t k = static_cast<std::size_t>(ts::uniform_int(rng, 0, static_cast<int>(target.size()) - 1));
    target.skip_weights[k] += ts::uniform(rng, 0.1, 5.0);
    CHECK(dp_match(a, b, 0.07, 0.03, p).cms <= before + 1e-12);
  }
}

TEST_CASE("self match and flips") {
  std::mt19937_64 rng(71);
  const MatchParams p;
  for (int trial = 0; trial < 100; ++trial) {
    const Polyline chain = ts::random_chain(rng, ts::uniform_int(rng, 4, 16));
    const auto a = build_descriptor(chain, 0.5);
    const auto self = chain_similarity(a, a, true, p);
    CHECK(self.score == doctest::Approx(static_cast<double>(a.size())));
    CHECK(self.gac == doctest::Approx(1.0));
    CHECK(self.variant_used == FlipVariant::identity);

    const auto mirrored = chain_similarity(a, build_descriptor(ts::mirror_x(chain), 0.5), true, p);
    CHECK(mirrored.score == doctest::Approx(self.score).epsilon(1e-9));
    CHECK(is_mirrored(mirrored.variant_used));

    const auto backwards = chain_similarity(a, build_descriptor(ts::reversed(chain), 0.5), true, p);
    CHECK(backwards.score == doctest::Approx(self.score).epsilon(1e-9));
    CHECK(backwards.variant_used == FlipVariant::reversed);
    // Pairs refer to the reversed variant's order: sketch joint i meets variant joint i.
    for (const auto& [x, y] : backwards.pairs) CHECK(x == y);

    const auto moved = build_descriptor(ts::similarity(chain, ts::uniform(rng, 0, kTwoPi), ts::uniform(rng, 0.2, 5),
                                                       Point2(ts::uniform(rng, -100, 100), 3.0)),
                                        0.5);
    CHECK(std::fabs(chain_similarity(a, moved, true, p).score - self.score) <= 1e-6);
  }
}

TEST_CASE("image-to-image similarity is symmetric") {
  std::mt19937_64 rng(73);
  const MatchParams p;
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = build_descriptor(ts::random_chain(rng, ts::uniform_int(rng, 3, 12)), 0.5);
    const auto b = build_descriptor(ts::random_chain(rng, ts::uniform_int(rng, 3, 12)), 0.5);
    CHECK(std::fabs(chain_score(a, b, false, p) - chain_score(b, a, false, p)) <= 1e-9);
  }
}

TEST_CASE("global angle consistency") {
  const MatchParams p;
  // Three points around their centroid, then the same with every subtended
  // angle widened by delta; radii chosen to keep the centroid at the origin.
  const double delta = 0.2;
  const double phi[3] = {0.0, 2 * kPi / 3, 4 * kPi / 3};
  const double psi[3] = {0.0, 2 * kPi / 3 + delta, 4 * kPi / 3 + 2 * delta};
  Polyline pa, pb;
  for (double f : phi) pa.emplace_back(std::cos(f), std::sin(f));
  const Point2 u0(1, 0), u1(std::cos(psi[1]), std::sin(psi[1])), u2(std::cos(psi[2]), std::sin(psi[2]));
  Eigen::Matrix2d m;
  m << u1, u2;
  const Eigen::Vector2d r = m.inverse() * (-u0);
  REQUIRE(r.minCoeff() > 0.0);
  pb = {u0, r(0) * u1, r(1) * u2};
  const std::vector<double> g{1, 1, 1}, t{1, 2, 3}, w{1, 1, 1};
  const auto a = descriptor_from_features(g, t, w, pa);
  const auto b = descriptor_from_features(g, t, w, pb);
  const std::vector<std::pair<int, int>> pairs{{0, 0}, {1, 1}, {2, 2}};
  CHECK(global_angle_consistency(a, b, pairs, p.lambda_ac) ==
        doctest::Approx(std::exp(-p.lambda_ac * delta * 2.0 / 3.0)).epsilon(1e-12));
  CHECK(global_angle_consistency(a, a, pairs, p.lambda_ac) == 1.0);
  const std::vector<std::pair<int, int>> one{{1, 2}};
  CHECK(global_angle_consistency(a, b, one, p.lambda_ac) == 1.0);
}
