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

#include <string>

namespace httplib {
class Server;
}

namespace sketchchain {

struct SketchRequest {
  std::vector<Polyline> strokes;
  double frame_width = kFrameSize;
  double frame_height = kFrameSize;
  int k = 10;
};

/// Parses the sketch wire format {strokes: [[[x, y], ...], ...], frame: [w, h], k}.
/// Throws Error(invalid_input) with a reason naming the offending field.
SketchRequest parse_sketch_request(const nlohmann::json& body);

nlohmann::json results_to_json(const std::vector<RankedRetrieval>& results);

/// Index statistics reported by GET /healthz.
nlohmann::json index_stats(const RetrievalEngine& engine);

/// Registers POST /query, GET /healthz and GET /params. The engine must
/// outlive the server.
void configure_routes(httplib::Server& server, const RetrievalEngine& engine,
                      const QueryOptions& defaults);

/// Blocking HTTP service on host:port.
void serve(const RetrievalEngine& engine, const std::string& host, int port,
           const QueryOptions& defaults);

}  // namespace sketchchain
