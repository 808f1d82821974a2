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

#include "sketchchain/matcher.hpp"

#include "sketchchain/descriptor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace sketchchain {

namespace {

// Joint features of one descriptor variant, laid out for the DP inner loop.
struct FeatureView {
  std::vector<double> gammas;
  std::vector<double> thetas;
  std::vector<double> skips;
  std::vector<int> point_index;  // variant joint -> index into the source points
  std::vector<double> grow;      // exp(lambda_ang * theta)
  std::vector<double> decay;     // exp(-lambda_ang * theta)

  int size() const { return static_cast<int>(gammas.size()); }
};

double negate_turn(double turn) { return turn >= kPi ? kPi : -turn; }

// Mirrors variant_descriptor() exactly without copying the point list.
void load_variant(const ChainDescriptor& d, FlipVariant v, FeatureView& out) {
  const int n = static_cast<int>(d.size());
  out.gammas.resize(n);
  out.thetas.resize(n);
  out.skips.resize(n);
  out.point_index.resize(n);
  if (v == FlipVariant::identity) {
    std::copy(d.gammas.begin(), d.gammas.end(), out.gammas.begin());
    std::copy(d.thetas.begin(), d.thetas.end(), out.thetas.begin());
    std::copy(d.skip_weights.begin(), d.skip_weights.end(), out.skips.begin());
    for (int j = 0; j < n; ++j) out.point_index[j] = j;
    return;
  }
  const bool rev = is_reversed(v);
  const bool mir = is_mirrored(v);
  for (int j = 0; j < n; ++j) {
    const int src = rev ? n - 1 - j : j;
    double turn = d.turns[src];
    if (rev) turn = negate_turn(turn);
    if (mir) turn = negate_turn(turn);
    // Lengths around variant joint j are the variant's segments j and j+1.
    const double before = rev ? d.segment_lengths[n - j] : d.segment_lengths[j];
    const double after = rev ? d.segment_lengths[n - 1 - j] : d.segment_lengths[j + 1];
    out.gammas[j] = before / after;
    out.thetas[j] = theta_from_turn(turn);
    out.skips[j] = d.skip_weights[src];
    out.point_index[j] = src;
  }
}

// DP tables for up to four variants against the same query, stored
// lane-interleaved so the lanes' row recurrences overlap in the pipeline.
struct DpTables {
  std::vector<double> cells;   // (rows+1) x (cols+1) x lanes
  std::vector<double> scores;  // joint scores, rows x cols x lanes
  std::vector<double> skips_b; // cols x lanes, already scaled by alpha_b
  int lanes = 0;
  int rows = 0;
  int cols = 0;
  std::array<int, 4> best_i{};
  std::array<int, 4> best_j{};

  double at(int lane, int i, int j) const {
    return cells[(static_cast<std::size_t>(i) * (cols + 1) + j) * lanes + lane];
  }
  double score(int lane, int i, int j) const {
    return scores[(static_cast<std::size_t>(i) * cols + j) * lanes + lane];
  }
  double best(int lane) const { return at(lane, best_i[lane], best_j[lane]); }
};

void load_angle_factors(double lambda_ang, FeatureView& f) {
  f.grow.resize(f.gammas.size());
  f.decay.resize(f.gammas.size());
  for (int j = 0; j < f.size(); ++j) {
    f.grow[j] = std::exp(lambda_ang * f.thetas[j]);
    f.decay[j] = std::exp(-lambda_ang * f.thetas[j]);
  }
}

// Length-ratio factors of all joint pairs, rows x cols. Mirroring keeps the
// gammas, so a variant and its mirror share this matrix.
void fill_length_scores(const FeatureView& a, const FeatureView& b, const MatchParams& params,
                        std::vector<double>& out) {
  const int m = b.size();
  out.resize(static_cast<std::size_t>(a.size()) * static_cast<std::size_t>(m));
  double* dst = out.data();
  for (int i = 0; i < a.size(); ++i) {
    const double ga = a.gammas[i];
    for (int j = 0; j < m; ++j) {
      const double gb = b.gammas[j];
      const double omega = ga < gb ? ga / gb : gb / ga;
      *dst++ = std::exp(-params.lambda_lr * (1.0 - omega));
    }
  }
}

// Joint scores of lane l = length[l] times the angle factor. exp(-lambda *
// circular difference) splits into per-joint factors, so no exponential is
// evaluated per cell. Backtracking reads the same values, so ties resolve as
// they were filled.
void fill_scores(const FeatureView& a, std::span<const FeatureView* const> bs,
                 std::span<const std::vector<double>* const> length, const MatchParams& params,
                 DpTables& t) {
  const int lanes = t.lanes;
  const int m = t.cols;
  t.scores.resize(static_cast<std::size_t>(t.rows) * m * lanes);
  const bool direct = params.lambda_ang * kTwoPi > 300.0;  // factors would overflow
  const double wrap = std::exp(-params.lambda_ang * kTwoPi);
  for (int l = 0; l < lanes; ++l) {
    const FeatureView& b = *bs[l];
    const double* src = length[l]->data();
    double* dst = t.scores.data() + l;
    for (int i = 0; i < t.rows; ++i) {
      const double ta = a.thetas[i];
      const double ga = a.grow[i];
      const double da = a.decay[i];
      for (int j = 0; j < m; ++j, dst += lanes) {
        const double tb = b.thetas[j];
        double angle;
        if (direct) {
          angle = std::exp(-params.lambda_ang * circular_difference(ta, tb));
        } else {
          const double d = ta - tb;
          const bool wrapped = std::fabs(d) > kPi;
          const bool falling = (d >= 0.0) != wrapped;
          angle = (falling ? da * b.grow[j] : ga * b.decay[j]) * (wrapped ? wrap : 1.0);
        }
        *dst = *src++ * angle;
      }
    }
  }
}

// Expects t.scores to be filled already. The best cell of each lane is the
// first strict maximum in row-major order.
template <int Lanes>
void fill_tables(const FeatureView& a, std::span<const FeatureView* const> bs, double alpha_a,
                 double alpha_b, DpTables& t) {
  const int cols = t.cols;
  const std::size_t stride = (static_cast<std::size_t>(cols) + 1) * Lanes;
  t.cells.resize((static_cast<std::size_t>(t.rows) + 1) * stride);
  t.skips_b.resize(static_cast<std::size_t>(cols) * Lanes);
  for (int j = 0; j < cols; ++j) {
    for (int l = 0; l < Lanes; ++l) t.skips_b[j * Lanes + l] = bs[l]->skips[j] * alpha_b;
  }
  std::fill_n(t.cells.begin(), stride, 0.0);
  double* m = t.cells.data();
  for (int i = 1; i <= t.rows; ++i) {
    const double skip_a = a.skips[i - 1] * alpha_a;
    double* row = m + i * stride;
    const double* up = row - stride;
    const double* joint = t.scores.data() + static_cast<std::size_t>(i - 1) * cols * Lanes;
    const double* skip_b = t.skips_b.data();
    for (int l = 0; l < Lanes; ++l) row[l] = 0.0;
    for (int j = 1; j <= cols; ++j) {
      const int here = j * Lanes;
      const int left = here - Lanes;
      for (int l = 0; l < Lanes; ++l) {
        const double diag = up[left + l] + joint[left + l];
        const double from_a = up[here + l] - skip_a;
        const double from_b = row[left + l] - skip_b[left + l];
        row[here + l] = std::max(std::max(diag, from_a), std::max(from_b, 0.0));
      }
    }
  }
  for (int l = 0; l < Lanes; ++l) {
    double best = 0.0;
    t.best_i[l] = 0;
    t.best_j[l] = 0;
    for (int i = 1; i <= t.rows; ++i) {
      const double* row = m + i * stride + l;
      for (int j = 1; j <= cols; ++j) {
        if (row[j * Lanes] > best) {
          best = row[j * Lanes];
          t.best_i[l] = i;
          t.best_j[l] = j;
        }
      }
    }
  }
}

// Walks back from the best cell to the first empty cell; diag wins ties,
// then skip-a, then skip-b.
void backtrack(const FeatureView& a, const FeatureView& b, double alpha_a, double alpha_b,
               const DpTables& t, int lane, MatchResult& out) {
  int i = t.best_i[lane];
  int j = t.best_j[lane];
  while (i > 0 && j > 0 && t.at(lane, i, j) > 0.0) {
    const double value = t.at(lane, i, j);
    const double s = t.score(lane, i - 1, j - 1);
    if (value == t.at(lane, i - 1, j - 1) + s) {
      out.pairs.emplace_back(i - 1, j - 1);
      --i;
      --j;
    } else if (value == t.at(lane, i - 1, j) - a.skips[i - 1] * alpha_a) {
      out.skipped_a.push_back(i - 1);
      --i;
    } else if (value == t.at(lane, i, j - 1) - b.skips[j - 1] * alpha_b) {
      out.skipped_b.push_back(j - 1);
      --j;
    } else {
      break;
    }
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  std::reverse(out.skipped_a.begin(), out.skipped_a.end());
  std::reverse(out.skipped_b.begin(), out.skipped_b.end());
}

double gac_from_points(const ChainDescriptor& a, const ChainDescriptor& b,
                       std::span<const int> b_point_index,
                       std::span<const std::pair<int, int>> pairs, double lambda_ac) {
  const std::size_t n = pairs.size();
  if (n < 2) return 1.0;
  Point2 ca = Point2::Zero();
  Point2 cb = Point2::Zero();
  for (const auto& [x, y] : pairs) {
    ca += a.points[x];
    cb += b.points[b_point_index[y]];
  }
  ca /= static_cast<double>(n);
  cb /= static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double angle_a = vertex_angle(a.points[pairs[k].first], ca, a.points[pairs[k + 1].first]);
    const double angle_b = vertex_angle(b.points[b_point_index[pairs[k].second]], cb,
                                        b.points[b_point_index[pairs[k + 1].second]]);
    sum += std::fabs(angle_a - angle_b);
  }
  return std::exp(-lambda_ac * sum / static_cast<double>(n));
}

struct Workspace {
  FeatureView a;
  std::array<FeatureView, 4> b;
  DpTables tables;
  std::array<std::vector<double>, 2> length;  // unreversed, reversed
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

MatchResult similarity_impl(const ChainDescriptor& a, const ChainDescriptor& b, bool a_is_sketch,
                            const MatchParams& params, bool keep_alignment) {
  if (a.size() == 0 || b.size() == 0) return {};
  const double alpha_a = a_is_sketch ? params.alpha_sketch : params.alpha_image;
  const double alpha_b = params.alpha_image;
  Workspace& ws = workspace();
  load_variant(a, FlipVariant::identity, ws.a);
  load_angle_factors(params.lambda_ang, ws.a);

  std::array<const FeatureView*, 4> bs{};
  std::array<const std::vector<double>*, 4> length{};
  for (int v = 0; v < 4; ++v) {
    load_variant(b, kAllVariants[v], ws.b[v]);
    load_angle_factors(params.lambda_ang, ws.b[v]);
    bs[v] = &ws.b[v];
    length[v] = &ws.length[is_reversed(kAllVariants[v]) ? 1 : 0];
  }
  fill_length_scores(ws.a, ws.b[0], params, ws.length[0]);
  fill_length_scores(ws.a, ws.b[1], params, ws.length[1]);
  DpTables& t = ws.tables;
  t.lanes = 4;
  t.rows = ws.a.size();
  t.cols = ws.b[0].size();
  fill_scores(ws.a, bs, length, params, t);
  fill_tables<4>(ws.a, bs, alpha_a, alpha_b, t);
  double best_cms = -1.0;
  for (int v = 0; v < 4; ++v) best_cms = std::max(best_cms, t.best(v));

  // Among the variants reaching the best CMS, keep the most consistent one.
  MatchResult best;
  best.score = -1.0;
  for (int v = 0; v < 4; ++v) {
    if (t.best(v) != best_cms) continue;
    MatchResult candidate;
    candidate.variant_used = kAllVariants[v];
    candidate.cms = best_cms;
    backtrack(ws.a, ws.b[v], alpha_a, alpha_b, t, v, candidate);
    candidate.gac = gac_from_points(a, b, ws.b[v].point_index, candidate.pairs, params.lambda_ac);
    candidate.score = candidate.gac * candidate.cms;
    if (candidate.score > best.score) best = std::move(candidate);
  }
  if (!keep_alignment) {
    best.skipped_a.clear();
    best.skipped_b.clear();
  }
  return best;
}

}  // namespace

double ratio_similarity(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::invalid_input, "ratio similarity needs positive arguments");
  }
  return std::min(a / b, b / a);
}

double length_ratio_score(double gamma_x, double gamma_y, const MatchParams& params) {
  return std::exp(-params.lambda_lr * (1.0 - ratio_similarity(gamma_x, gamma_y)));
}

double angle_score(double theta_x, double theta_y, const MatchParams& params) {
  return std::exp(-params.lambda_ang * circular_difference(theta_x, theta_y));
}

double joint_score(double gamma_x, double theta_x, double gamma_y, double theta_y,
                   const MatchParams& params) {
  return std::exp(-params.lambda_lr * (1.0 - ratio_similarity(gamma_x, gamma_y)) -
                  params.lambda_ang * circular_difference(theta_x, theta_y));
}

MatchResult dp_match(const ChainDescriptor& a, const ChainDescriptor& b, double alpha_a,
                     double alpha_b, const MatchParams& params) {
  MatchResult out;
  out.variant_used = b.variant;
  if (a.size() == 0 || b.size() == 0) return out;
  FeatureView fa;
  FeatureView fb;
  load_variant(a, FlipVariant::identity, fa);
  load_variant(b, FlipVariant::identity, fb);
  load_angle_factors(params.lambda_ang, fa);
  load_angle_factors(params.lambda_ang, fb);
  std::vector<double> length;
  fill_length_scores(fa, fb, params, length);
  const std::array<const FeatureView*, 1> bs{&fb};
  const std::array<const std::vector<double>*, 1> lengths{&length};
  DpTables table;
  table.lanes = 1;
  table.rows = fa.size();
  table.cols = fb.size();
  fill_scores(fa, bs, lengths, params, table);
  fill_tables<1>(fa, bs, alpha_a, alpha_b, table);
  out.cms = table.best(0);
  backtrack(fa, fb, alpha_a, alpha_b, table, 0, out);
  out.score = out.cms;
  return out;
}

double global_angle_consistency(const ChainDescriptor& a, const ChainDescriptor& b,
                                std::span<const std::pair<int, int>> pairs, double lambda_ac) {
  std::vector<int> identity(b.points.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  return gac_from_points(a, b, identity, pairs, lambda_ac);
}

MatchResult chain_similarity(const ChainDescriptor& a, const ChainDescriptor& b, bool a_is_sketch,
                             const MatchParams& params) {
  return similarity_impl(a, b, a_is_sketch, params, true);
}

double chain_score(const ChainDescriptor& a, const ChainDescriptor& b, bool a_is_sketch,
                   const MatchParams& params) {
  return similarity_impl(a, b, a_is_sketch, params, false).score;
}

}  // namespace sketchchain
