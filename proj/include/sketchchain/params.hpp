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

#include <json.hpp>

#include <cstdint>
#include <string>

namespace sketchchain {

struct ExtractionParams {
  int scale_m = 5;
  double sigma = 2.0;
  double split_threshold = 0.4;
  double merge_radius = 3.0;
  double lambda_l = 1.0;
  double lambda_s = 2.0;
  int n_oc = 5;
  double overlap_threshold = 0.6;
  int n_gop = 20;
  double border_margin = 4.0;
  double min_perimeter = 40.0;
  double resample_step = 2.0;
};

struct MatchParams {
  double lambda_lr = 0.5;
  double lambda_ang = 2.0;
  double alpha_sketch = 0.07;
  double alpha_image = 0.03;
  double lambda_ac = 2.0;
};

struct IndexParams {
  int branching = 32;
  int max_leaf = 100;
  double th_ms = 0.8;
  int max_depth = 8;
  int refine_iterations = 0;
};

struct RetrievalParams {
  double lambda_c = 1.0;
  double lambda_a = 2.0;
  int th_nj = 5;
  double cs_floor = 0.5;
  int target_candidates = 1500;
};

/// The full parameter ledger. Every value is overridable from a JSON file
/// (see load_params_from_env) and echoed back by the HTTP service.
struct Params {
  ExtractionParams extraction;
  double lambda_skc = 0.5;
  MatchParams match;
  IndexParams index;
  RetrievalParams retrieval;
};

/// Throws Error(invalid_input) naming the first out-of-range value.
void validate(const Params& params);

/// Flat JSON object, one key per ledger entry.
nlohmann::json to_json(const Params& params);

/// Overrides the entries present in `json`; unknown keys are rejected.
Params apply_overrides(Params params, const nlohmann::json& json);

Params load_params_file(const std::string& path);

/// Defaults, overridden by the file named in SKETCHCHAIN_CONFIG if set.
Params load_params_from_env();

inline constexpr const char* kConfigEnvVar = "SKETCHCHAIN_CONFIG";

}  // namespace sketchchain
