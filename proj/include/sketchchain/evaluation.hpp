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

#include "sketchchain/retrieval.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace sketchchain {

struct EvalQuery {
  std::string query_id;
  std::string category;
  std::vector<Polyline> strokes;
  double frame_width = kFrameSize;
  double frame_height = kFrameSize;
};

/// JSONL, one {query_id, category, strokes, frame} per line.
std::vector<EvalQuery> read_eval_queries(const std::string& path);

/// JSON object mapping image_id to category.
std::map<std::string, std::string> read_labels(const std::string& path);

struct QueryPrecision {
  std::string query_id;
  std::string category;
  std::vector<double> precision;  // one per k level
  std::size_t unlabeled = 0;
  std::string error;              // set when the query could not run
};

/// Fraction of the first `k` ranked ids labelled `category`. Missing ranks
/// and unlabeled images count as negatives; `unlabeled` is incremented for
/// every unlabeled id seen.
double precision_at_k(const std::vector<std::string>& ranked_ids,
                      const std::map<std::string, std::string>& labels,
                      const std::string& category, int k, std::size_t* unlabeled = nullptr);

struct CategorySummary {
  std::string category;
  std::size_t queries = 0;
  std::vector<double> best;
  std::vector<double> worst;
  std::vector<double> average;
};

struct EvalReport {
  std::vector<int> k_levels;
  std::vector<QueryPrecision> queries;
  std::vector<CategorySummary> categories;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Best/worst/average precision per category and k level.
std::vector<CategorySummary> summarize(const std::vector<QueryPrecision>& queries,
                                       std::size_t levels);

EvalReport evaluate(const RetrievalEngine& engine, const std::vector<EvalQuery>& queries,
                    const std::map<std::string, std::string>& labels,
                    const std::vector<int>& k_levels, const QueryOptions& options);

}  // namespace sketchchain
