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

#include "sketchchain/geometry.hpp"
#include "sketchchain/params.hpp"
#include "sketchchain/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sketchchain {

/// Binary edge raster in the normalized frame; nonzero pixels are edges.
struct EdgeMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  bool at(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height &&
           pixels[static_cast<std::size_t>(y) * width + x] != 0;
  }
};

/// Reads an 8-bit binary PGM (P5) file.
EdgeMask read_pgm(const std::string& path);

/// Traces 8-connected pixel runs into open polylines. Pixels with three or
/// more neighbours are junctions: runs stop there and both runs share the
/// junction pixel as an endpoint.
std::vector<Polyline> trace_edge_contours(const EdgeMask& mask);

/// Polyline passthrough; drops consecutive duplicates and degenerate inputs.
std::vector<Polyline> trace_edge_contours(std::span<const Polyline> polylines);

/// Gaussian-weighted deviation-from-straight at every point, using up to
/// `scale_m` neighbours on either side. Open curves truncate the window at
/// the ends; closed curves wrap around.
std::vector<double> curvature_profile(std::span<const Point2> points, int scale_m, double sigma,
                                      bool closed = false);

/// Indices of the split points of a curvature profile: strict local maxima
/// (or two-sample plateaus) above `threshold`.
std::vector<int> curvature_peaks(std::span<const double> profile, double threshold,
                                 bool closed = false);

/// Splits a polyline at high-curvature points into straight-ish pieces that
/// share their split points.
std::vector<Polyline> curvature_split(std::span<const Point2> polyline, int scale_m, double sigma,
                                      double split_threshold);

struct GraphEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
  Polyline polyline;
};

/// Weighted contour segment network: merged segment endpoints as vertices,
/// segments as edges weighted by their length.
struct JointGraph {
  std::vector<Point2> vertices;
  std::vector<GraphEdge> edges;

  /// Distinct neighbour vertices per vertex, ascending.
  std::vector<std::vector<int>> neighbours() const;
};

JointGraph build_joint_graph(std::span<const Polyline> segments, double merge_radius);

struct SpanningTree {
  std::vector<int> vertices;  // ascending
  std::vector<int> edges;     // indices into JointGraph::edges
  double weight = 0.0;
};

struct SpanningForest {
  std::vector<SpanningTree> trees;

  double total_weight() const;
};

/// Kruskal on descending weights, one tree per connected component.
SpanningForest max_spanning_forest(const JointGraph& graph);

/// Chain score of a vertex path: every segment's length is boosted by the
/// normalized smoothness of the continuations at both of its ends.
double score_chain(std::span<const int> path, const JointGraph& graph, double lambda_l,
                   double lambda_s);

struct ScoredChain {
  Chain chain;
  double score = 0.0;
  std::vector<int> vertex_path;
  std::vector<int> edge_path;
};

/// Scores every leaf-to-leaf path of every tree through root prefix sums and
/// lowest common ancestors, then greedily keeps up to `n_oc` chains whose
/// overlap with the kept ones stays below `overlap_threshold`.
std::vector<ScoredChain> extract_top_chains(const SpanningForest& forest, const JointGraph& graph,
                                            int n_oc, double overlap_threshold, double lambda_l,
                                            double lambda_s);

/// Shared edge length of two chains over the shorter chain's length.
double chain_overlap(const ScoredChain& a, const ScoredChain& b, const JointGraph& graph);

struct RegionProposal {
  Polyline boundary;  // closed; the last point may repeat the first
  double score = 0.0;
};

/// Turns the top `n_gop` region proposals into closed chains opened at their
/// sharpest joint. Proposals mostly on the frame border or with a small
/// perimeter are dropped.
std::vector<Chain> ingest_region_boundaries(std::span<const RegionProposal> proposals,
                                            double frame_width, double frame_height,
                                            const ExtractionParams& params);

/// Full chain extraction for one database image whose inputs are already in
/// the normalized frame: polylines are resampled, split, networked, and the
/// top chains kept; region proposals contribute closed chains.
std::vector<Chain> extract_image_chains(const std::string& image_id,
                                        std::span<const Polyline> polylines,
                                        std::span<const RegionProposal> regions,
                                        double frame_width, double frame_height,
                                        const ExtractionParams& params);

/// Resamples and curvature-splits every polyline, then chains the pieces.
std::vector<ScoredChain> chain_polylines(std::span<const Polyline> polylines,
                                         const ExtractionParams& params);

}  // namespace sketchchain
