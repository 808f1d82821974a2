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

#include "sketchchain/descriptor.hpp"
#include "sketchchain/index_io.hpp"
#include "sketchchain/store.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstring>
#include <sstream>

using namespace sketchchain;
namespace ts = sketchchain::testsupport;

namespace {

std::string record_line(const std::string& image, const std::string& chain, const Polyline& pts,
                        double w = 256, double h = 256) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : pts) points.push_back({p.x(), p.y()});
  return nlohmann::json{{"image_id", image}, {"chain_id", chain}, {"source", "csn"},
                        {"points", points}, {"original_size", {w, h}}}
      .dump();
}

std::string saved(const ChainTree& tree, const Params& params) {
  std::ostringstream out(std::ios::binary);
  save_index(tree, params, out);
  return out.str();
}

LoadedIndex loaded(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return load_index(in);
}

ErrorCode load_error(const std::string& bytes) {
  try {
    loaded(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("load succeeded");
  return ErrorCode::invalid_input;
}

}  // namespace

TEST_CASE("ingesting an empty corpus warns") {
  std::istringstream in("");
  ChainStore store;
  const auto report = ingest_corpus(in, store);
  CHECK(report.accepted == 0);
  CHECK(report.warnings.size() == 1);
  CHECK(store.chain_count() == 0);
}

TEST_CASE("ingest skips bad lines with their line numbers") {
  std::mt19937_64 rng(2);
  std::ostringstream text;
  text << R"({"format":"sketchchain-chains","version":1})" << "\n";
  text << record_line("a", "0", ts::random_chain(rng, 6)) << "\n";
  text << record_line("a", "1", {{0, 0}, {10, 0}}) << "\n";
  text << "{not json\n";
  text << "\n";
  text << R"({"image_id":"b","chain_id":"0","points":[[0,0],[1,1],[2,0]]})" << "\n";
  text << record_line("a", "0", ts::random_chain(rng, 6)) << "\n";
  text << record_line("b", "1", ts::random_chain(rng, 6)) << "\n";
  std::istringstream in(text.str());
  ChainStore store;
  const auto report = ingest_corpus(in, store);
  CHECK(report.accepted == 2);
  REQUIRE(report.skipped.size() == 4);
  CHECK(report.skipped[0].line == 3);
  CHECK(report.skipped[1].line == 4);
  CHECK(report.skipped[2].line == 6);
  CHECK(report.skipped[3].line == 7);
  CHECK(store.image_count() == 2);
}

TEST_CASE("ingest rejects another chain format version") {
  std::istringstream in(R"({"format":"sketchchain-chains","version":2})"
                        "\n");
  ChainStore store;
  try {
    ingest_corpus(in, store);
    FAIL("expected a version error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::version);
  }
}

TEST_CASE("ingest accepts a thousand records and normalizes the frame") {
  std::mt19937_64 rng(4);
  std::ostringstream text;
  std::vector<Polyline> raw;
  for (int i = 0; i < 1000; ++i) {
    raw.push_back(ts::place_in_frame(ts::random_chain(rng, 5), rng, 512.0));
    text << record_line("img" + std::to_string(i / 4), std::to_string(i % 4), raw.back(), 512, 300)
         << "\n";
  }
  std::istringstream in(text.str());
  ChainStore store;
  const auto report = ingest_corpus(in, store);
  CHECK(report.accepted == 1000);
  CHECK(report.skipped.empty());
  REQUIRE(store.chain_count() == 1000);
  CHECK(store.image_count() == 250);
  for (std::size_t i = 0; i < 1000; i += 97) {
    const auto& c = store.chain(i);
    REQUIRE(c.joints.size() == raw[i].size());
    for (std::size_t j = 0; j < c.joints.size(); ++j) {
      CHECK(c.joints[j].x() == doctest::Approx(raw[i][j].x() * 0.5));
      CHECK(c.joints[j].y() == doctest::Approx(raw[i][j].y() * 0.5));
    }
  }
}

TEST_CASE("chain records round-trip through jsonl") {
  std::mt19937_64 rng(6);
  const Chain c = make_chain("im", "x", ChainSource::region, ts::random_chain(rng, 8));
  std::istringstream in(chain_to_jsonl(c) + "\n");
  ChainStore store;
  CHECK(ingest_corpus(in, store).accepted == 1);
  const auto& back = store.chain(0);
  CHECK(back.source == ChainSource::region);
  CHECK(back.image_id == "im");
  for (std::size_t j = 0; j < c.joints.size(); ++j) {
    CHECK(back.joints[j].x() == doctest::Approx(c.joints[j].x()));
    CHECK(back.joints[j].y() == doctest::Approx(c.joints[j].y()));
  }
}

TEST_CASE("index save and load") {
  std::mt19937_64 rng(8);
  const auto store = ts::random_store(rng, 80, 4);
  Params params;
  params.index.branching = 4;
  params.index.max_leaf = 25;
  const auto tree = build_tree(store, params.index, params.match, 77);
  const std::string bytes = saved(tree, params);
  CHECK(std::memcmp(bytes.data(), "SKCH", 4) == 0);
  CHECK(bytes.substr(bytes.size() - 4) == "HCKS");

  SUBCASE("search output survives a round trip") {
    const auto back = loaded(bytes);
    CHECK(back.tree.seed == 77);
    CHECK(back.tree.nodes.size() == tree.nodes.size());
    CHECK(back.params.index.max_leaf == 25);
    for (int probe = 0; probe < 50; ++probe) {
      const auto q = build_descriptor(ts::random_chain(rng, ts::uniform_int(rng, 5, 12)), 0.5);
      const auto a = search(tree, q, 10);
      const auto b = search(back.tree, q, 10);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].image == b[i].image);
        CHECK(a[i].chain == b[i].chain);
        CHECK(a[i].score == b[i].score);
      }
    }
    CHECK(saved(back.tree, back.params) == bytes);
  }

  SUBCASE("same seed gives identical bytes") {
    const auto again = build_tree(store, params.index, params.match, 77);
    CHECK(saved(again, params) == bytes);
    const auto other = build_tree(store, params.index, params.match, 78);
    CHECK(saved(other, params) != bytes);
  }

  SUBCASE("truncated files are format errors") {
    for (std::size_t len : {std::size_t{0}, std::size_t{3}, std::size_t{8}, std::size_t{20},
                            bytes.size() / 3, bytes.size() / 2, bytes.size() - 5,
                            bytes.size() - 1}) {
      CHECK(load_error(bytes.substr(0, len)) == ErrorCode::format);
    }
  }

  SUBCASE("bad magic is a format error") {
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK(load_error(bad) == ErrorCode::format);
    bad = bytes;
    bad[bad.size() - 1] = 'X';
    CHECK(load_error(bad) == ErrorCode::format);
  }

  SUBCASE("a newer version is a version error") {
    std::string bad = bytes;
    bad[4] = static_cast<char>(kIndexFormatVersion + 1);
    CHECK(load_error(bad) == ErrorCode::version);
  }

  SUBCASE("missing files are io errors") {
    try {
      load_index(std::string("/nonexistent/dir/index.skc"));
      FAIL("expected an io error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io);
    }
  }
}
