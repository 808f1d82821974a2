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

#include "sketchchain/params.hpp"

#include "sketchchain/types.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <string_view>

namespace sketchchain {

namespace {

// One accessor per ledger key so that serialization, overrides and
// validation share a single list.
template <typename Fn>
void for_each_entry(Params& p, Fn&& fn) {
  fn("scale_m", p.extraction.scale_m);
  fn("sigma", p.extraction.sigma);
  fn("split_threshold", p.extraction.split_threshold);
  fn("merge_radius", p.extraction.merge_radius);
  fn("lambda_l", p.extraction.lambda_l);
  fn("lambda_s", p.extraction.lambda_s);
  fn("n_oc", p.extraction.n_oc);
  fn("overlap_threshold", p.extraction.overlap_threshold);
  fn("n_gop", p.extraction.n_gop);
  fn("border_margin", p.extraction.border_margin);
  fn("min_perimeter", p.extraction.min_perimeter);
  fn("resample_step", p.extraction.resample_step);
  fn("lambda_skc", p.lambda_skc);
  fn("lambda_lr", p.match.lambda_lr);
  fn("lambda_ang", p.match.lambda_ang);
  fn("alpha_sketch", p.match.alpha_sketch);
  fn("alpha_image", p.match.alpha_image);
  fn("lambda_ac", p.match.lambda_ac);
  fn("branching", p.index.branching);
  fn("max_leaf", p.index.max_leaf);
  fn("th_ms", p.index.th_ms);
  fn("max_depth", p.index.max_depth);
  fn("refine_iterations", p.index.refine_iterations);
  fn("lambda_c", p.retrieval.lambda_c);
  fn("lambda_a", p.retrieval.lambda_a);
  fn("th_nj", p.retrieval.th_nj);
  fn("cs_floor", p.retrieval.cs_floor);
  fn("target_candidates", p.retrieval.target_candidates);
}

void require(bool ok, std::string_view name, std::string_view rule) {
  if (!ok) {
    throw Error(ErrorCode::invalid_input,
                "parameter " + std::string(name) + " must be " + std::string(rule));
  }
}

}  // namespace

void validate(const Params& params) {
  Params copy = params;
  for_each_entry(copy, [](std::string_view name, auto value) {
    if (name == "refine_iterations" || name == "cs_floor") {
      require(value >= 0, name, "non-negative");
    } else {
      require(value > 0, name, "positive");
    }
  });
  require(params.extraction.overlap_threshold < 1.0, "overlap_threshold", "below 1");
  require(params.index.th_ms <= 1.0, "th_ms", "at most 1");
  require(params.index.branching >= 2, "branching", "at least 2");
}

nlohmann::json to_json(const Params& params) {
  nlohmann::json out = nlohmann::json::object();
  Params copy = params;
  for_each_entry(copy, [&](std::string_view name, auto value) { out[std::string(name)] = value; });
  return out;
}

Params apply_overrides(Params params, const nlohmann::json& json) {
  if (!json.is_object()) throw Error(ErrorCode::invalid_input, "parameter file must be a JSON object");
  std::size_t used = 0;
  for_each_entry(params, [&](std::string_view name, auto& value) {
    const auto it = json.find(std::string(name));
    if (it == json.end()) return;
    if (!it->is_number()) {
      throw Error(ErrorCode::invalid_input, "parameter " + std::string(name) + " must be a number");
    }
    using T = std::remove_reference_t<decltype(value)>;
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) {
        throw Error(ErrorCode::invalid_input,
                    "parameter " + std::string(name) + " must be an integer");
      }
    }
    value = it->get<T>();
    ++used;
  });
  if (used != json.size()) {
    Params probe;
    for (const auto& [key, _] : json.items()) {
      bool known = false;
      for_each_entry(probe, [&](std::string_view name, auto&) { known = known || name == key; });
      if (!known) throw Error(ErrorCode::invalid_input, "unknown parameter " + key);
    }
  }
  validate(params);
  return params;
}

Params load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read parameter file " + path);
  nlohmann::json json;
  try {
    in >> json;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, "parameter file " + path + ": " + e.what());
  }
  return apply_overrides(Params{}, json);
}

Params load_params_from_env() {
  const char* path = std::getenv(kConfigEnvVar);
  if (path == nullptr || *path == '\0') return Params{};
  return load_params_file(path);
}

}  // namespace sketchchain
