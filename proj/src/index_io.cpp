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

#include "sketchchain/index_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace sketchchain {

namespace {

constexpr char kEndMarker[4] = {'H', 'C', 'K', 'S'};
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 32;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }

  template <typename T>
  void integer(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xFFu);
    bytes(buf, sizeof(T));
  }

  void real(double value) { integer(std::bit_cast<std::uint64_t>(value)); }

  void string(const std::string& s) {
    integer(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(ErrorCode::format, "index file is truncated");
    }
  }

  template <typename T>
  T integer() {
    using U = std::make_unsigned_t<T>;
    unsigned char buf[sizeof(T)];
    bytes(buf, sizeof(T));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(buf[i]) << (8 * i));
    return static_cast<T>(u);
  }

  double real() { return std::bit_cast<double>(integer<std::uint64_t>()); }

  std::uint64_t count() {
    const auto n = integer<std::uint64_t>();
    if (n > kMaxCount) throw Error(ErrorCode::format, "index file has an implausible count");
    return n;
  }

  std::string string() {
    std::string s(integer<std::uint32_t>(), '\0');
    if (!s.empty()) bytes(s.data(), s.size());
    return s;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_index(const ChainTree& tree, const Params& params, std::ostream& out) {
  if (!tree.store) throw Error(ErrorCode::invalid_input, "tree has no chain store");
  const ChainStore& store = *tree.store;
  Params snapshot = params;
  snapshot.index = tree.params;
  snapshot.match = tree.match;
  snapshot.lambda_skc = store.lambda_skc();

  const nlohmann::json manifest = {
      {"seed", tree.seed},
      {"frame", kFrameSize},
      {"params", to_json(snapshot)},
      {"counts",
       {{"chains", store.chain_count()}, {"images", store.image_count()}, {"nodes", tree.nodes.size()}}},
  };
  const std::string text = manifest.dump();

  Writer w(out);
  w.bytes(kIndexMagic, 4);
  w.integer(kIndexFormatVersion);
  w.integer(static_cast<std::uint64_t>(text.size()));
  w.bytes(text.data(), text.size());

  w.integer(static_cast<std::uint64_t>(store.chain_count()));
  for (std::size_t i = 0; i < store.chain_count(); ++i) {
    const Chain& c = store.chain(i);
    w.string(c.image_id);
    w.string(c.chain_id);
    w.integer(static_cast<std::uint8_t>(c.source));
    w.integer(static_cast<std::uint32_t>(c.joints.size()));
    for (const auto& p : c.joints) {
      w.real(p.x());
      w.real(p.y());
    }
  }

  w.integer(static_cast<std::uint64_t>(tree.nodes.size()));
  for (const auto& node : tree.nodes) {
    w.integer(static_cast<std::int32_t>(node.medoid));
    w.integer(static_cast<std::int32_t>(node.depth));
    w.integer(static_cast<std::uint32_t>(node.children.size()));
    for (int c : node.children) w.integer(static_cast<std::int32_t>(c));
    w.integer(static_cast<std::uint32_t>(node.members.size()));
    for (int m : node.members) w.integer(static_cast<std::int32_t>(m));
  }
  w.bytes(kEndMarker, 4);
  if (!out) throw Error(ErrorCode::io, "failed to write index");
}

void save_index(const ChainTree& tree, const Params& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write index file " + path);
  save_index(tree, params, out);
  out.close();
  if (!out) throw Error(ErrorCode::io, "failed to write index file " + path);
}

LoadedIndex load_index(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kIndexMagic, 4) != 0) throw Error(ErrorCode::format, "not a sketchchain index (bad magic)");
  const auto version = r.integer<std::uint32_t>();
  if (version != kIndexFormatVersion) {
    throw Error(ErrorCode::version, "unsupported index format version " + std::to_string(version));
  }
  std::string text(r.count(), '\0');
  if (!text.empty()) r.bytes(text.data(), text.size());

  LoadedIndex loaded;
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text);
    loaded.params = apply_overrides(Params{}, manifest.at("params"));
    loaded.tree.seed = manifest.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, std::string("corrupt index manifest: ") + e.what());
  }
  validate(loaded.params);

  auto store = std::make_shared<ChainStore>(loaded.params.lambda_skc);
  const std::uint64_t chains = r.count();
  for (std::uint64_t i = 0; i < chains; ++i) {
    std::string image_id = r.string();
    std::string chain_id = r.string();
    const auto source = r.integer<std::uint8_t>();
    if (source > static_cast<std::uint8_t>(ChainSource::sketch)) {
      throw Error(ErrorCode::format, "corrupt chain source in index");
    }
    Polyline joints(r.integer<std::uint32_t>());
    for (auto& p : joints) {
      const double x = r.real();
      const double y = r.real();
      p = Point2(x, y);
    }
    store->add(make_chain(std::move(image_id), std::move(chain_id), static_cast<ChainSource>(source),
                          std::move(joints)));
  }

  const std::uint64_t node_count = r.count();
  loaded.tree.nodes.resize(node_count);
  auto index_in = [](std::int32_t v, std::uint64_t limit) {
    if (v < 0 || static_cast<std::uint64_t>(v) >= limit) {
      throw Error(ErrorCode::format, "index node reference out of range");
    }
    return static_cast<int>(v);
  };
  for (std::uint64_t n = 0; n < node_count; ++n) {
    IndexNode& node = loaded.tree.nodes[n];
    const auto medoid = r.integer<std::int32_t>();
    node.medoid = n == 0 ? -1 : index_in(medoid, chains);
    node.depth = r.integer<std::int32_t>();
    node.children.resize(r.integer<std::uint32_t>());
    for (auto& c : node.children) c = index_in(r.integer<std::int32_t>(), node_count);
    node.members.resize(r.integer<std::uint32_t>());
    for (auto& m : node.members) m = index_in(r.integer<std::int32_t>(), chains);
  }
  char end[4];
  r.bytes(end, 4);
  if (std::memcmp(end, kEndMarker, 4) != 0) throw Error(ErrorCode::format, "index file is missing its end marker");

  loaded.tree.store = std::move(store);
  loaded.tree.params = loaded.params.index;
  loaded.tree.match = loaded.params.match;
  return loaded;
}

LoadedIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read index file " + path);
  return load_index(in);
}

}  // namespace sketchchain
