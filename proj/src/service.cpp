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

#include "sketchchain/service.hpp"

#include <httplib.h>

namespace sketchchain {

namespace {

constexpr int kMaxResults = 1000;

nlohmann::json points_json(const Polyline& points) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : points) out.push_back({p.x(), p.y()});
  return out;
}

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  reply(res, status, {{"error", code}, {"message", message}});
}

}  // namespace

SketchRequest parse_sketch_request(const nlohmann::json& body) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::invalid_input, why); };
  if (!body.is_object()) throw bad("request body must be a JSON object");
  if (!body.contains("strokes") || !body.at("strokes").is_array()) throw bad("strokes must be an array");
  SketchRequest req;
  for (const auto& stroke : body.at("strokes")) {
    if (!stroke.is_array()) throw bad("each stroke must be an array of points");
    Polyline line;
    for (const auto& p : stroke) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw bad("each point must be [x, y]");
      }
      line.emplace_back(p[0].get<double>(), p[1].get<double>());
      if (!line.back().allFinite()) throw bad("point coordinates must be finite");
    }
    req.strokes.push_back(std::move(line));
  }
  if (req.strokes.empty()) throw bad("strokes must not be empty");
  if (body.contains("frame")) {
    const auto& frame = body.at("frame");
    if (!frame.is_array() || frame.size() != 2 || !frame[0].is_number() || !frame[1].is_number()) {
      throw bad("frame must be [w, h]");
    }
    req.frame_width = frame[0].get<double>();
    req.frame_height = frame[1].get<double>();
    if (!(req.frame_width > 0.0) || !(req.frame_height > 0.0)) throw bad("frame must be positive");
  }
  if (body.contains("k")) {
    const auto& k = body.at("k");
    if (!k.is_number_integer()) throw bad("k must be an integer");
    req.k = k.get<int>();
    if (req.k < 1 || req.k > kMaxResults) throw bad("k must be between 1 and " + std::to_string(kMaxResults));
  }
  return req;
}

nlohmann::json results_to_json(const std::vector<RankedRetrieval>& results) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t k = 0; k < r.pairs.size(); ++k) {
      const auto& p = r.pairs[k];
      pairs.push_back({{"sketch_chain_id", p.sketch_chain_id},
                       {"image_chain_id", p.image_chain_id},
                       {"matched_sketch_points", points_json(p.sketch_points)},
                       {"matched_image_points", points_json(p.image_points)},
                       {"cs", p.match.score},
                       {"gc", k < r.consistency.size() ? r.consistency[k] : 1.0},
                       {"variant", std::string(to_string(p.match.variant_used))}});
    }
    list.push_back({{"image_id", r.image_id}, {"score", r.score}, {"pairs", std::move(pairs)}});
  }
  return {{"results", std::move(list)}, {"frame", {kFrameSize, kFrameSize}}};
}

nlohmann::json index_stats(const RetrievalEngine& engine) {
  const ChainTree& tree = engine.tree();
  return {{"status", "ok"},
          {"chains", engine.store().chain_count()},
          {"images", engine.store().image_count()},
          {"nodes", tree.nodes.size()},
          {"leaves", tree.leaf_count()},
          {"depth", tree.depth()},
          {"seed", tree.seed}};
}

void configure_routes(httplib::Server& server, const RetrievalEngine& engine,
                      const QueryOptions& defaults) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  server.Options("/query", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Post("/query", [&engine, defaults](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      reply_error(res, 400, "malformed_json", e.what());
      return;
    }
    try {
      const SketchRequest sketch = parse_sketch_request(body);
      QueryOptions opts = defaults;
      opts.k = sketch.k;
      const auto results = engine.query(sketch.strokes, sketch.frame_width, sketch.frame_height, opts);
      reply(res, 200, results_to_json(results));
    } catch (const Error& e) {
      const int status = e.code() == ErrorCode::empty_query ? 422 : 400;
      reply_error(res, status, to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "internal", e.what());
    }
  });

  server.Get("/healthz", [&engine](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, index_stats(engine));
  });

  server.Get("/params", [&engine](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, to_json(engine.params()));
  });
}

void serve(const RetrievalEngine& engine, const std::string& host, int port,
           const QueryOptions& defaults) {
  httplib::Server server;
  configure_routes(server, engine, defaults);
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace sketchchain
