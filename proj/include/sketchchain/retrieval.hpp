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
#include "sketchchain/params.hpp"
#include "sketchchain/types.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sketchchain {

struct SketchQuery {
  std::vector<Polyline> strokes;  // normalized frame, device order
  std::vector<Chain> chains;
  std::vector<ChainDescriptor> descriptors;
};

/// Sketch strokes to chains: resample, curvature split, merge stroke ends,
/// chain, and drop chains with fewer than th_nj interior joints. Throws
/// Error(empty_query) when nothing survives.
SketchQuery sketch_to_chains(std::span<const Polyline> strokes, const Params& params);

/// Same, for strokes in a canvas of the given size.
SketchQuery sketch_to_chains(std::span<const Polyline> strokes, double frame_width,
                             double frame_height, const Params& params);

struct MatchedPair {
  int sketch_chain = 0;
  int image_chain = 0;
  std::string sketch_chain_id;
  std::string image_chain_id;
  MatchResult match;
  Polyline sketch_points;  // matched sketch joints, in match order
  Polyline image_points;   // matched image joints, in match order
  Point2 sketch_centroid = Point2::Zero();
  Point2 image_centroid = Point2::Zero();
  double matched_length_sketch = 0.0;
  double matched_length_image = 0.0;
};

/// Fills the geometry of a pair from its alignment.
MatchedPair make_matched_pair(const SketchQuery& sketch, int sketch_chain,
                              const ImageRecord& image, int image_chain, MatchResult match);

struct SeedPair {
  int sketch_chain = 0;
  int image_chain = 0;
};

/// Scores every sketch chain against every image chain, drops pairs below the
/// chain score floor and keeps a one-to-one assignment by greedy descending
/// score. Seeded pairs take part like any other pair.
std::vector<MatchedPair> complete_pair_matching(const SketchQuery& sketch,
                                                const ImageRecord& image,
                                                std::span<const SeedPair> seeded,
                                                const Params& params);

/// Distance consistency G_d of pair p against p'.
double pair_distance_consistency(const MatchedPair& p, const MatchedPair& p_prime,
                                 double lambda_c);

/// Angular consistency G_a of pair p against p'. With `mirrored`, the image
/// layout is compared with the reflected sketch layout.
double pair_angular_consistency(const MatchedPair& p, const MatchedPair& p_prime, double lambda_a,
                                bool mirrored = false);

struct RankedRetrieval {
  std::string image_id;
  std::vector<MatchedPair> pairs;
  std::vector<double> consistency;  // GC per pair
  double score = 0.0;
};

struct CandidateImage {
  const ImageRecord* image = nullptr;
  std::vector<MatchedPair> pairs;
};

/// Geometric-consistency weighted image scores, best first, ties by image id.
std::vector<RankedRetrieval> rank_images(std::span<const CandidateImage> candidates,
                                         const Params& params);

/// GC of every pair of one image.
std::vector<double> geometric_consistency(std::span<const MatchedPair> pairs,
                                          const RetrievalParams& params);

struct QueryOptions {
  int k = 10;
  int target_candidates = 1500;
  bool exhaustive = false;
};

/// Read-only query pipeline over an immutable tree snapshot.
class RetrievalEngine {
 public:
  RetrievalEngine(std::shared_ptr<const ChainTree> tree, Params params);

  const ChainTree& tree() const { return *tree_; }
  const ChainStore& store() const { return *tree_->store; }
  const Params& params() const { return params_; }

  std::vector<RankedRetrieval> query(const SketchQuery& sketch, const QueryOptions& options) const;

  /// Normalizes, extracts sketch chains, then queries.
  std::vector<RankedRetrieval> query(std::span<const Polyline> strokes, double frame_width,
                                     double frame_height, const QueryOptions& options) const;

 private:
  std::shared_ptr<const ChainTree> tree_;
  Params params_;
};

}  // namespace sketchchain
