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

#include "sketchchain/retrieval.hpp"

#include "sketchchain/descriptor.hpp"
#include "sketchchain/extraction.hpp"
#include "sketchchain/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sketchchain {

SketchQuery sketch_to_chains(std::span<const Polyline> strokes, const Params& params) {
  bool usable = false;
  for (const auto& s : strokes) usable = usable || s.size() >= 3;
  if (!usable) throw Error(ErrorCode::invalid_input, "a sketch needs a stroke with at least three points");

  SketchQuery query;
  query.strokes.assign(strokes.begin(), strokes.end());
  int next_id = 0;
  for (auto& scored : chain_polylines(strokes, params.extraction)) {
    if (scored.chain.joints.size() < 3) continue;
    ChainDescriptor d = build_descriptor(scored.chain, params.lambda_skc);
    if (d.size() < static_cast<std::size_t>(params.retrieval.th_nj)) continue;
    Chain chain = std::move(scored.chain);
    chain.image_id = "sketch";
    chain.chain_id = "s" + std::to_string(next_id++);
    chain.source = ChainSource::sketch;
    query.chains.push_back(std::move(chain));
    query.descriptors.push_back(std::move(d));
  }
  if (query.chains.empty()) {
    throw Error(ErrorCode::empty_query, "every sketch chain has fewer than " +
                                            std::to_string(params.retrieval.th_nj) + " joints");
  }
  return query;
}

SketchQuery sketch_to_chains(std::span<const Polyline> strokes, double frame_width,
                             double frame_height, const Params& params) {
  std::vector<Polyline> normalized;
  normalized.reserve(strokes.size());
  for (const auto& s : strokes) normalized.push_back(normalize_frame(s, frame_width, frame_height));
  return sketch_to_chains(normalized, params);
}

namespace {

// Interior joint index in the chain's own order for a pair index expressed in
// the order of the matched variant.
int original_joint(int index, std::size_t joints, FlipVariant variant) {
  return is_reversed(variant) ? static_cast<int>(joints) - 1 - index : index;
}

double span_length(const Polyline& joints, int first, int last) {
  if (first > last) std::swap(first, last);
  // Interior joint i sits at joints[i + 1].
  return polyline_length(std::span<const Point2>(joints).subspan(
      static_cast<std::size_t>(first) + 1, static_cast<std::size_t>(last - first) + 1));
}

}  // namespace

MatchedPair make_matched_pair(const SketchQuery& sketch, int sketch_chain,
                              const ImageRecord& image, int image_chain, MatchResult match) {
  MatchedPair p;
  const Chain& s = sketch.chains[static_cast<std::size_t>(sketch_chain)];
  const Chain& c = image.chains[static_cast<std::size_t>(image_chain)];
  const std::size_t image_joints = image.descriptors[static_cast<std::size_t>(image_chain)].size();
  p.sketch_chain = sketch_chain;
  p.image_chain = image_chain;
  p.sketch_chain_id = s.chain_id;
  p.image_chain_id = c.chain_id;
  int s_lo = 0, s_hi = -1, i_lo = 0, i_hi = -1;
  for (const auto& [x, y] : match.pairs) {
    const int yi = original_joint(y, image_joints, match.variant_used);
    p.sketch_points.push_back(s.joints[static_cast<std::size_t>(x) + 1]);
    p.image_points.push_back(c.joints[static_cast<std::size_t>(yi) + 1]);
    if (s_hi < 0) {
      s_lo = s_hi = x;
      i_lo = i_hi = yi;
    }
    s_lo = std::min(s_lo, x);
    s_hi = std::max(s_hi, x);
    i_lo = std::min(i_lo, yi);
    i_hi = std::max(i_hi, yi);
  }
  if (!match.pairs.empty()) {
    p.sketch_centroid = centroid(p.sketch_points);
    p.image_centroid = centroid(p.image_points);
    p.matched_length_sketch = span_length(s.joints, s_lo, s_hi);
    p.matched_length_image = span_length(c.joints, i_lo, i_hi);
  }
  p.match = std::move(match);
  return p;
}

std::vector<MatchedPair> complete_pair_matching(const SketchQuery& sketch,
                                                const ImageRecord& image,
                                                std::span<const SeedPair> seeded,
                                                const Params& params) {
  struct Scored {
    double cs;
    int s;
    int i;
    MatchResult match;
  };
  // Seeds only say the image was shortlisted; every pair is rescored so the
  // seeded ones compete on equal terms.
  (void)seeded;
  std::vector<Scored> scored;
  for (std::size_t s = 0; s < sketch.descriptors.size(); ++s) {
    for (std::size_t i = 0; i < image.descriptors.size(); ++i) {
      MatchResult m = chain_similarity(sketch.descriptors[s], image.descriptors[i], true, params.match);
      if (m.score >= params.retrieval.cs_floor && !m.pairs.empty()) {
        scored.push_back({m.score, static_cast<int>(s), static_cast<int>(i), std::move(m)});
      }
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.cs > b.cs; });
  std::vector<bool> sketch_used(sketch.descriptors.size(), false);
  std::vector<bool> image_used(image.descriptors.size(), false);
  std::vector<MatchedPair> out;
  for (auto& entry : scored) {
    if (sketch_used[entry.s] || image_used[entry.i]) continue;
    sketch_used[entry.s] = true;
    image_used[entry.i] = true;
    out.push_back(make_matched_pair(sketch, entry.s, image, entry.i, std::move(entry.match)));
  }
  std::sort(out.begin(), out.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.sketch_chain < b.sketch_chain; });
  return out;
}

double pair_distance_consistency(const MatchedPair& p, const MatchedPair& p_prime,
                                 double lambda_c) {
  constexpr double floor = 1e-9;
  const double length_s = p.matched_length_sketch + p_prime.matched_length_sketch;
  const double length_i = p.matched_length_image + p_prime.matched_length_image;
  const double d_s = (p.sketch_centroid - p_prime.sketch_centroid).norm();
  const double d_i = (p.image_centroid - p_prime.image_centroid).norm();
  const double n_s = std::max(length_s > 0.0 ? d_s / length_s : 0.0, floor);
  const double n_i = std::max(length_i > 0.0 ? d_i / length_i : 0.0, floor);
  return std::exp(-lambda_c * (1.0 - ratio_similarity(n_s, n_i)));
}

double pair_angular_consistency(const MatchedPair& p, const MatchedPair& p_prime, double lambda_a,
                                bool mirrored) {
  const std::size_t n = std::min(p.sketch_points.size(), p.image_points.size());
  if (n == 0) return 1.0;
  const Point2 axis_s = p_prime.sketch_centroid - p.sketch_centroid;
  const Point2 axis_i = p_prime.image_centroid - p.image_centroid;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 vs = p.sketch_points[k] - p.sketch_centroid;
    const Point2 vi = p.image_points[k] - p.image_centroid;
    if (vs.squaredNorm() == 0.0 || vi.squaredNorm() == 0.0) continue;
    double phi_s = relative_angle(axis_s, vs);
    if (mirrored) phi_s = -phi_s;
    sum += circular_difference(phi_s, relative_angle(axis_i, vi));
  }
  return std::exp(-lambda_a * sum / static_cast<double>(n));
}

std::vector<double> geometric_consistency(std::span<const MatchedPair> pairs,
                                          const RetrievalParams& params) {
  std::vector<double> gc(pairs.size(), 1.0);
  if (pairs.size() < 2) return gc;
  std::size_t mirrored_votes = 0;
  for (const auto& p : pairs) mirrored_votes += is_mirrored(p.match.variant_used) ? 1 : 0;
  const bool mirrored = 2 * mirrored_votes > pairs.size();
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    double best = 0.0;
    for (std::size_t b = 0; b < pairs.size(); ++b) {
      if (a == b) continue;
      const double g = pair_distance_consistency(pairs[a], pairs[b], params.lambda_c) *
                       pair_angular_consistency(pairs[a], pairs[b], params.lambda_a, mirrored);
      best = std::max(best, g);
    }
    gc[a] = best;
  }
  return gc;
}

std::vector<RankedRetrieval> rank_images(std::span<const CandidateImage> candidates,
                                         const Params& params) {
  std::vector<RankedRetrieval> ranked;
  for (const auto& candidate : candidates) {
    if (candidate.image == nullptr || candidate.pairs.empty()) continue;
    RankedRetrieval r;
    r.image_id = candidate.image->image_id;
    r.pairs = candidate.pairs;
    r.consistency = geometric_consistency(r.pairs, params.retrieval);
    for (std::size_t k = 0; k < r.pairs.size(); ++k) r.score += r.consistency[k] * r.pairs[k].match.score;
    ranked.push_back(std::move(r));
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedRetrieval& a, const RankedRetrieval& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.image_id < b.image_id;
  });
  return ranked;
}

RetrievalEngine::RetrievalEngine(std::shared_ptr<const ChainTree> tree, Params params)
    : tree_(std::move(tree)), params_(std::move(params)) {
  if (!tree_ || !tree_->store) throw Error(ErrorCode::invalid_input, "retrieval needs a built index");
  validate(params_);
}

std::vector<RankedRetrieval> RetrievalEngine::query(const SketchQuery& sketch,
                                                    const QueryOptions& options) const {
  if (options.k < 1) throw Error(ErrorCode::invalid_input, "k must be at least 1");
  const ChainStore& store = *tree_->store;
  std::map<int, std::vector<SeedPair>> shortlisted;
  for (std::size_t s = 0; s < sketch.descriptors.size(); ++s) {
    const auto hits = options.exhaustive
                          ? exhaustive_search(store, sketch.descriptors[s], tree_->match, true)
                          : search(*tree_, sketch.descriptors[s], options.target_candidates, true);
    for (const auto& hit : hits) {
      shortlisted[hit.image].push_back({static_cast<int>(s), store.ref(hit.chain).chain});
    }
  }
  std::vector<CandidateImage> candidates;
  candidates.reserve(shortlisted.size());
  for (const auto& [image, seeds] : shortlisted) {
    const ImageRecord& record = store.image(image);
    auto pairs = complete_pair_matching(sketch, record, seeds, params_);
    if (!pairs.empty()) candidates.push_back({&record, std::move(pairs)});
  }
  auto ranked = rank_images(candidates, params_);
  if (ranked.size() > static_cast<std::size_t>(options.k)) ranked.resize(static_cast<std::size_t>(options.k));
  return ranked;
}

std::vector<RankedRetrieval> RetrievalEngine::query(std::span<const Polyline> strokes,
                                                    double frame_width, double frame_height,
                                                    const QueryOptions& options) const {
  return query(sketch_to_chains(strokes, frame_width, frame_height, params_), options);
}

}  // namespace sketchchain
