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
#include "sketchchain/extraction.hpp"
#include "sketchchain/index_io.hpp"
#include "sketchchain/retrieval.hpp"
#include "sketchchain/service.hpp"
#include "sketchchain/store.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace sc = sketchchain;
using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sc::Error(sc::ErrorCode::io, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw sc::Error(sc::ErrorCode::format, path + ": " + e.what());
  }
}

// Parameters for commands that run against a built index: the index's own
// ledger, with query-time keys from SKETCHCHAIN_CONFIG layered on top.
sc::Params query_params(const sc::LoadedIndex& loaded) {
  const char* path = std::getenv(sc::kConfigEnvVar);
  if (path == nullptr || *path == '\0') return loaded.params;
  const sc::Params requested = sc::apply_overrides(loaded.params, read_json_file(path));
  sc::Params merged = requested;
  merged.match = loaded.params.match;
  merged.lambda_skc = loaded.params.lambda_skc;
  merged.index = loaded.params.index;
  if (sc::to_json(merged) != sc::to_json(requested)) {
    std::cerr << "warning: matching and index parameters are fixed by the index; config values ignored\n";
  }
  return merged;
}

std::shared_ptr<const sc::ChainTree> load_tree(const std::string& path, sc::Params& params) {
  auto loaded = sc::load_index(path);
  params = query_params(loaded);
  return std::make_shared<const sc::ChainTree>(std::move(loaded.tree));
}

sc::Polyline parse_points(const json& points) {
  sc::Polyline out;
  for (const auto& p : points) {
    if (!p.is_array() || p.size() != 2) throw sc::Error(sc::ErrorCode::format, "points must be [x, y] pairs");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

// One extraction record: {image_id, original_size, polylines, regions, edge_mask}.
std::vector<sc::Chain> extract_record(const json& record, const std::filesystem::path& base,
                                      const sc::Params& params) {
  const std::string image_id = record.at("image_id").get<std::string>();
  std::vector<sc::Polyline> raw;
  double width = 0.0;
  double height = 0.0;
  if (record.contains("original_size")) {
    width = record.at("original_size").at(0).get<double>();
    height = record.at("original_size").at(1).get<double>();
  }
  if (record.contains("edge_mask")) {
    const auto mask = sc::read_pgm((base / record.at("edge_mask").get<std::string>()).string());
    if (width <= 0.0) {
      width = mask.width;
      height = mask.height;
    }
    raw = sc::trace_edge_contours(mask);
  }
  for (const auto& line : record.value("polylines", json::array())) raw.push_back(parse_points(line));
  if (width <= 0.0 || height <= 0.0) {
    throw sc::Error(sc::ErrorCode::invalid_input, "record needs original_size or an edge mask");
  }

  std::vector<sc::Polyline> polylines;
  for (const auto& line : raw) polylines.push_back(sc::normalize_frame(line, width, height));
  std::vector<sc::RegionProposal> regions;
  for (const auto& r : record.value("regions", json::array())) {
    regions.push_back({sc::normalize_frame(parse_points(r.at("points")), width, height),
                       r.value("score", 0.0)});
  }
  std::stable_sort(regions.begin(), regions.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  const double scale = sc::frame_scale(width, height);
  return sc::extract_image_chains(image_id, polylines, regions, width * scale, height * scale,
                                  params.extraction);
}

int run_extract(const std::string& input, const std::string& output) {
  const sc::Params params = sc::load_params_from_env();
  std::ifstream in(input);
  if (!in) throw sc::Error(sc::ErrorCode::io, "cannot read " + input);
  std::ofstream out(output, std::ios::trunc);
  if (!out) throw sc::Error(sc::ErrorCode::io, "cannot write " + output);
  out << json{{"format", "sketchchain-chains"}, {"version", sc::kChainFormatVersion}}.dump() << '\n';
  const auto base = std::filesystem::path(input).parent_path();
  std::string line;
  std::size_t number = 0;
  std::size_t images = 0;
  std::size_t chains = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      for (const auto& chain : extract_record(json::parse(line), base, params)) {
        out << sc::chain_to_jsonl(chain) << '\n';
        ++chains;
      }
      ++images;
    } catch (const std::exception& e) {
      std::cerr << input << ":" << number << ": skipped: " << e.what() << '\n';
    }
  }
  std::cerr << "extracted " << chains << " chains from " << images << " images\n";
  return 0;
}

int run_build(const std::string& chains, const std::string& output, std::uint64_t seed,
              sc::Params params) {
  sc::validate(params);
  auto store = std::make_shared<sc::ChainStore>(params.lambda_skc);
  const auto report = sc::ingest_corpus(chains, *store);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& s : report.skipped) std::cerr << chains << ":" << s.line << ": skipped: " << s.reason << '\n';
  if (store->chain_count() == 0) throw sc::Error(sc::ErrorCode::invalid_input, "no chains to index");
  const auto start = std::chrono::steady_clock::now();
  const auto tree = sc::build_tree(store, params.index, params.match, seed);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  sc::save_index(tree, params, output);
  std::cerr << "indexed " << store->chain_count() << " chains from " << store->image_count()
            << " images: " << tree.nodes.size() << " nodes, depth " << tree.depth() << ", "
            << seconds << " s\n";
  return 0;
}

int run_query(const std::string& index, const std::string& sketch_path, int k, int candidates,
              bool exhaustive) {
  sc::Params params;
  auto tree = load_tree(index, params);
  const sc::RetrievalEngine engine(tree, params);
  const auto request = sc::parse_sketch_request(read_json_file(sketch_path));
  sc::QueryOptions opts;
  opts.k = k > 0 ? k : request.k;
  opts.target_candidates = candidates > 0 ? candidates : params.retrieval.target_candidates;
  opts.exhaustive = exhaustive;
  const auto results = engine.query(request.strokes, request.frame_width, request.frame_height, opts);
  std::cout << sc::results_to_json(results).dump(2) << '\n';
  return 0;
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> levels;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      const int k = std::stoi(item, &used);
      if (used != item.size() || k < 1) throw std::invalid_argument(item);
      levels.push_back(k);
    } catch (const std::logic_error&) {
      throw sc::Error(sc::ErrorCode::invalid_input, "bad precision level '" + item + "'");
    }
    pos = comma + 1;
  }
  return levels;
}

int run_eval(const std::string& index, const std::string& queries, const std::string& labels,
             const std::string& at, int candidates, bool exhaustive, const std::string& report_path) {
  sc::Params params;
  auto tree = load_tree(index, params);
  const sc::RetrievalEngine engine(tree, params);
  sc::QueryOptions opts;
  opts.target_candidates = candidates > 0 ? candidates : params.retrieval.target_candidates;
  opts.exhaustive = exhaustive;
  const auto report = sc::evaluate(engine, sc::read_eval_queries(queries), sc::read_labels(labels),
                                   parse_levels(at), opts);
  std::cout << report.to_table();
  for (const auto& q : report.queries) {
    if (!q.error.empty()) std::cerr << "query " << q.query_id << ": " << q.error << '\n';
  }
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) throw sc::Error(sc::ErrorCode::io, "cannot write " + report_path);
    out << report.to_json().dump(2) << '\n';
  }
  return 0;
}

int run_serve(const std::string& index, const std::string& host, int port, int candidates) {
  sc::Params params;
  auto tree = load_tree(index, params);
  const sc::RetrievalEngine engine(tree, params);
  sc::QueryOptions defaults;
  defaults.target_candidates = candidates > 0 ? candidates : params.retrieval.target_candidates;
  std::cerr << "serving " << engine.store().chain_count() << " chains on " << host << ":" << port << '\n';
  sc::serve(engine, host, port, defaults);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-based shape retrieval over contour chains"};
  app.require_subcommand(1);

  std::string input, output;
  auto* extract = app.add_subcommand("extract", "Extract chains from polylines, regions and edge masks");
  extract->add_option("--input", input, "Image records (JSONL)")->required();
  extract->add_option("--output", output, "Chain file to write (JSONL)")->required();

  auto* index_cmd = app.add_subcommand("index", "Index operations");
  index_cmd->require_subcommand(1);
  auto* build = index_cmd->add_subcommand("build", "Build an index from a chain file");
  std::string chains;
  std::uint64_t seed = 1;
  sc::Params build_params;
  build->add_option("--chains", chains, "Chain file (JSONL)")->required();
  build->add_option("--output", output, "Index file to write")->required();
  build->add_option("--seed", seed, "Random seed");
  build->add_option("--branching", build_params.index.branching, "Children per node");
  build->add_option("--max-leaf", build_params.index.max_leaf, "Maximum chains per leaf");
  build->add_option("--th-ms", build_params.index.th_ms, "Multi-assignment threshold");

  std::string index, sketch;
  int k = 0;
  int candidates = 0;
  bool exhaustive = false;
  auto* query = app.add_subcommand("query", "Query an index with a sketch file");
  query->add_option("--index", index, "Index file")->required();
  query->add_option("--sketch", sketch, "Sketch JSON {strokes, frame, k}")->required();
  query->add_option("--k", k, "Number of results");
  query->add_option("--candidates", candidates, "Images to shortlist per sketch chain");
  query->add_flag("--exhaustive", exhaustive, "Scan every chain instead of searching the tree");

  std::string queries, labels, at = "5,10,25,50", report;
  auto* eval = app.add_subcommand("eval", "Precision at K over labelled sketch queries");
  eval->add_option("--index", index, "Index file")->required();
  eval->add_option("--queries", queries, "Query file (JSONL)")->required();
  eval->add_option("--labels", labels, "Labels {image_id: category} (JSON)")->required();
  eval->add_option("--at", at, "Comma-separated K levels");
  eval->add_option("--candidates", candidates, "Images to shortlist per sketch chain");
  eval->add_flag("--exhaustive", exhaustive, "Scan every chain instead of searching the tree");
  eval->add_option("--report", report, "Write the JSON report here");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve queries over HTTP");
  serve->add_option("--index", index, "Index file")->required();
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--candidates", candidates, "Images to shortlist per sketch chain");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) return run_extract(input, output);
    if (*build) {
      sc::Params params = sc::load_params_from_env();
      // Flags given on the command line win over the config file.
      if (build->count("--branching") > 0) params.index.branching = build_params.index.branching;
      if (build->count("--max-leaf") > 0) params.index.max_leaf = build_params.index.max_leaf;
      if (build->count("--th-ms") > 0) params.index.th_ms = build_params.index.th_ms;
      return run_build(chains, output, seed, params);
    }
    if (*query) return run_query(index, sketch, k, candidates, exhaustive);
    if (*eval) return run_eval(index, queries, labels, at, candidates, exhaustive, report);
    if (*serve) return run_serve(index, host, port, candidates);
  } catch (const sc::Error& e) {
    std::cerr << "error (" << sc::to_string(e.code()) << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
