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

#include "sketchchain/store.hpp"

#include "sketchchain/descriptor.hpp"

#include <fstream>
#include <istream>

namespace sketchchain {

void ChainStore::add(Chain chain) {
  if (chain.image_id.empty()) throw Error(ErrorCode::invalid_input, "chain without image_id");
  if (chain.joints.size() < 3) {
    throw Error(ErrorCode::too_short, "chain " + chain.chain_id + " has no interior joint");
  }
  ChainDescriptor descriptor = build_descriptor(chain, lambda_skc_);
  auto it = by_id_.find(chain.image_id);
  if (it == by_id_.end()) {
    it = by_id_.emplace(chain.image_id, static_cast<int>(images_.size())).first;
    images_.push_back(ImageRecord{chain.image_id, {}, {}});
  }
  ImageRecord& record = images_[static_cast<std::size_t>(it->second)];
  for (const auto& existing : record.chains) {
    if (existing.chain_id == chain.chain_id) {
      throw Error(ErrorCode::invalid_input,
                  "duplicate chain " + chain.chain_id + " in image " + chain.image_id);
    }
  }
  flat_.push_back({it->second, static_cast<int>(record.chains.size())});
  record.chains.push_back(std::move(chain));
  record.descriptors.push_back(std::move(descriptor));
}

const ImageRecord* ChainStore::find(std::string_view image_id) const {
  const int index = image_index(image_id);
  return index < 0 ? nullptr : &images_[static_cast<std::size_t>(index)];
}

int ChainStore::image_index(std::string_view image_id) const {
  const auto it = by_id_.find(image_id);
  return it == by_id_.end() ? -1 : it->second;
}

const Chain& ChainStore::chain(std::size_t flat_index) const {
  const ChainRef r = flat_.at(flat_index);
  return images_[static_cast<std::size_t>(r.image)].chains[static_cast<std::size_t>(r.chain)];
}

const ChainDescriptor& ChainStore::descriptor(std::size_t flat_index) const {
  const ChainRef r = flat_.at(flat_index);
  return images_[static_cast<std::size_t>(r.image)].descriptors[static_cast<std::size_t>(r.chain)];
}

namespace {

Chain parse_record(const nlohmann::json& record) {
  if (!record.is_object()) throw Error(ErrorCode::format, "record is not a JSON object");
  for (const char* key : {"image_id", "chain_id", "points", "original_size"}) {
    if (!record.contains(key)) throw Error(ErrorCode::format, std::string("missing field ") + key);
  }
  const auto& image_id = record.at("image_id");
  const auto& chain_id = record.at("chain_id");
  if (!image_id.is_string() || !chain_id.is_string()) {
    throw Error(ErrorCode::format, "image_id and chain_id must be strings");
  }
  ChainSource source = ChainSource::csn;
  if (record.contains("source")) {
    const auto& s = record.at("source");
    const auto parsed = s.is_string() ? parse_chain_source(s.get<std::string>()) : std::nullopt;
    if (!parsed) throw Error(ErrorCode::format, "unknown chain source");
    source = *parsed;
  }
  const auto& size = record.at("original_size");
  if (!size.is_array() || size.size() != 2 || !size[0].is_number() || !size[1].is_number()) {
    throw Error(ErrorCode::format, "original_size must be [w, h]");
  }
  const auto& points = record.at("points");
  if (!points.is_array()) throw Error(ErrorCode::format, "points must be an array");
  Polyline raw;
  raw.reserve(points.size());
  for (const auto& p : points) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::format, "each point must be [x, y]");
    }
    raw.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  Polyline joints = normalize_frame(raw, size[0].get<double>(), size[1].get<double>());
  return make_chain(image_id.get<std::string>(), chain_id.get<std::string>(), source,
                    std::move(joints));
}

}  // namespace

IngestReport ingest_corpus(std::istream& in, ChainStore& store) {
  IngestReport report;
  std::string line;
  std::size_t number = 0;
  bool any_content = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      report.skipped.push_back({number, "malformed JSON"});
      continue;
    }
    if (!any_content && record.is_object() && record.contains("format")) {
      any_content = true;
      if (record.value("format", std::string()) != "sketchchain-chains") {
        throw Error(ErrorCode::format, "not a sketchchain chain file");
      }
      if (record.value("version", -1) != kChainFormatVersion) {
        throw Error(ErrorCode::version, "unsupported chain file version " +
                                            record.value("version", nlohmann::json()).dump());
      }
      continue;
    }
    any_content = true;
    try {
      store.add(parse_record(record));
      ++report.accepted;
    } catch (const Error& e) {
      report.skipped.push_back({number, e.what()});
    }
  }
  if (in.bad()) throw Error(ErrorCode::io, "read error while ingesting chains");
  if (!any_content) report.warnings.push_back("chain file is empty");
  return report;
}

IngestReport ingest_corpus(const std::string& path, ChainStore& store) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read chain file " + path);
  return ingest_corpus(in, store);
}

std::string chain_to_jsonl(const Chain& chain) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : chain.joints) points.push_back({p.x(), p.y()});
  nlohmann::json record = {
      {"image_id", chain.image_id},
      {"chain_id", chain.chain_id},
      {"source", std::string(to_string(chain.source))},
      {"points", std::move(points)},
      {"original_size", {kFrameSize, kFrameSize}},
  };
  return record.dump();
}

}  // namespace sketchchain
