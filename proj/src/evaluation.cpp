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

#include "sketchchain/evaluation.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sketchchain {

namespace {

std::vector<Polyline> parse_strokes(const nlohmann::json& strokes) {
  if (!strokes.is_array()) throw Error(ErrorCode::format, "strokes must be an array");
  std::vector<Polyline> out;
  for (const auto& stroke : strokes) {
    if (!stroke.is_array()) throw Error(ErrorCode::format, "each stroke must be an array of points");
    Polyline line;
    for (const auto& p : stroke) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw Error(ErrorCode::format, "each point must be [x, y]");
      }
      line.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    out.push_back(std::move(line));
  }
  return out;
}

void read_frame(const nlohmann::json& object, EvalQuery& q) {
  if (!object.contains("frame")) return;
  const auto& frame = object.at("frame");
  if (!frame.is_array() || frame.size() != 2 || !frame[0].is_number() || !frame[1].is_number()) {
    throw Error(ErrorCode::format, "frame must be [w, h]");
  }
  q.frame_width = frame[0].get<double>();
  q.frame_height = frame[1].get<double>();
}

std::string format_level(int k) { return "P@" + std::to_string(k); }

}  // namespace

std::vector<EvalQuery> read_eval_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read query file " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::vector<EvalQuery> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(number) + ": ";
    try {
      const auto record = nlohmann::json::parse(line);
      EvalQuery q;
      q.query_id = record.value("query_id", "q" + std::to_string(out.size()));
      q.category = record.at("category").get<std::string>();
      if (record.contains("sketch")) {
        // A separate sketch file in the HTTP wire format.
        const std::filesystem::path sketch_path = base / record.at("sketch").get<std::string>();
        std::ifstream sketch_in(sketch_path);
        if (!sketch_in) throw Error(ErrorCode::io, "cannot read sketch " + sketch_path.string());
        const auto sketch = nlohmann::json::parse(sketch_in);
        q.strokes = parse_strokes(sketch.at("strokes"));
        read_frame(sketch, q);
      } else {
        q.strokes = parse_strokes(record.at("strokes"));
        read_frame(record, q);
      }
      out.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::format, where + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  return out;
}

std::map<std::string, std::string> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read label file " + path);
  try {
    const auto json = nlohmann::json::parse(in);
    if (!json.is_object()) throw Error(ErrorCode::format, path + ": labels must be a JSON object");
    return json.get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, path + ": " + e.what());
  }
}

double precision_at_k(const std::vector<std::string>& ranked_ids,
                      const std::map<std::string, std::string>& labels,
                      const std::string& category, int k, std::size_t* unlabeled) {
  if (k < 1) throw Error(ErrorCode::invalid_input, "precision level must be at least 1");
  const std::size_t limit = std::min(ranked_ids.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < limit; ++i) {
    const auto it = labels.find(ranked_ids[i]);
    if (it == labels.end()) {
      if (unlabeled != nullptr) ++*unlabeled;
    } else if (it->second == category) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::vector<CategorySummary> summarize(const std::vector<QueryPrecision>& queries,
                                       std::size_t levels) {
  std::map<std::string, CategorySummary> by_category;
  for (const auto& q : queries) {
    auto& s = by_category[q.category];
    if (s.queries == 0) {
      s.category = q.category;
      s.best.assign(levels, 0.0);
      s.worst.assign(levels, 1.0);
      s.average.assign(levels, 0.0);
    }
    ++s.queries;
    for (std::size_t l = 0; l < levels; ++l) {
      const double p = l < q.precision.size() ? q.precision[l] : 0.0;
      s.best[l] = std::max(s.best[l], p);
      s.worst[l] = std::min(s.worst[l], p);
      s.average[l] += p;
    }
  }
  std::vector<CategorySummary> out;
  for (auto& [name, s] : by_category) {
    for (double& a : s.average) a /= static_cast<double>(s.queries);
    out.push_back(std::move(s));
  }
  return out;
}

EvalReport evaluate(const RetrievalEngine& engine, const std::vector<EvalQuery>& queries,
                    const std::map<std::string, std::string>& labels,
                    const std::vector<int>& k_levels, const QueryOptions& options) {
  if (k_levels.empty()) throw Error(ErrorCode::invalid_input, "no precision levels requested");
  EvalReport report;
  report.k_levels = k_levels;
  QueryOptions opts = options;
  opts.k = *std::max_element(k_levels.begin(), k_levels.end());
  for (const auto& q : queries) {
    QueryPrecision qp;
    qp.query_id = q.query_id;
    qp.category = q.category;
    std::vector<std::string> ids;
    try {
      for (const auto& r : engine.query(q.strokes, q.frame_width, q.frame_height, opts)) {
        ids.push_back(r.image_id);
      }
    } catch (const Error& e) {
      qp.error = e.what();
    }
    for (int k : k_levels) {
      std::size_t unlabeled = 0;
      qp.precision.push_back(precision_at_k(ids, labels, q.category, k, &unlabeled));
      qp.unlabeled = std::max(qp.unlabeled, unlabeled);
    }
    report.queries.push_back(std::move(qp));
  }
  report.categories = summarize(report.queries, k_levels.size());
  return report;
}

nlohmann::json EvalReport::to_json() const {
  auto levels_object = [this](const std::vector<double>& values) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t l = 0; l < k_levels.size() && l < values.size(); ++l) {
      o[std::to_string(k_levels[l])] = values[l];
    }
    return o;
  };
  nlohmann::json out;
  out["k_levels"] = k_levels;
  out["queries"] = nlohmann::json::array();
  std::size_t unlabeled = 0;
  for (const auto& q : queries) {
    nlohmann::json entry = {{"query_id", q.query_id},
                            {"category", q.category},
                            {"precision", levels_object(q.precision)},
                            {"unlabeled", q.unlabeled}};
    if (!q.error.empty()) entry["error"] = q.error;
    unlabeled += q.unlabeled;
    out["queries"].push_back(std::move(entry));
  }
  out["categories"] = nlohmann::json::array();
  for (const auto& c : categories) {
    out["categories"].push_back({{"category", c.category},
                                 {"queries", c.queries},
                                 {"best", levels_object(c.best)},
                                 {"worst", levels_object(c.worst)},
                                 {"average", levels_object(c.average)}});
  }
  out["unlabeled_results"] = unlabeled;
  return out;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << std::left << std::setw(16) << "category" << std::right << std::setw(8) << "queries";
  for (int k : k_levels) out << std::setw(20) << format_level(k) + " B/W/A";
  out << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& c : categories) {
    out << std::left << std::setw(16) << c.category << std::right << std::setw(8) << c.queries;
    for (std::size_t l = 0; l < k_levels.size(); ++l) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << c.best[l] << '/' << c.worst[l] << '/' << c.average[l];
      out << std::setw(20) << cell.str();
    }
    out << '\n';
  }
  std::size_t unlabeled = 0;
  for (const auto& q : queries) unlabeled += q.unlabeled;
  if (unlabeled > 0) out << "warning: " << unlabeled << " retrieved images had no label (counted as negatives)\n";
  return out.str();
}

}  // namespace sketchchain
