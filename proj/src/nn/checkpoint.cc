// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "n2n/common/error.h"

namespace n2n::nn {
namespace {

constexpr char kMagic[8] = {'N', '2', 'N', 'C', 'K', 'P', 'T', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads assume a little-endian host");

template <typename T>
void WritePod(std::ofstream &out, T v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
bool ReadPod(std::ifstream &in, T *v) {
  return static_cast<bool>(in.read(reinterpret_cast<char *>(v), sizeof(T)));
}

}  // namespace

void Checkpoint::Save(const std::filesystem::path &path) const {
  nlohmann::json h = header;
  nlohmann::json index = nlohmann::json::array();
  for (const auto &[name, t] : tensors) {
    index.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
  }
  h["tensors"] = index;
  const std::string text = h.dump();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(kMagic, sizeof(kMagic));
    WritePod<uint32_t>(out, kVersion);
    WritePod<uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto &[name, t] : tensors) {
      out.write(reinterpret_cast<const char *>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!out) throw DataError("short write to checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::Load(const std::filesystem::path &path) {
  const std::string where = "checkpoint " + path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + where);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(where + ": bad magic (not an n2nvc checkpoint)");
  }
  uint32_t version = 0;
  uint64_t size = 0;
  if (!ReadPod(in, &version) || !ReadPod(in, &size)) throw DataError(where + ": truncated header");
  if (version != kVersion) {
    throw DataError(where + ": unsupported version " + std::to_string(version));
  }
  if (size > (1ull << 30)) throw DataError(where + ": implausible header size");
  std::string text(size, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(size))) {
    throw DataError(where + ": truncated header");
  }
  Checkpoint ck;
  try {
    ck.header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(where + ": malformed header: " + e.what());
  }
  if (!ck.header.contains("tensors") || !ck.header["tensors"].is_array()) {
    throw DataError(where + ": header has no tensor index");
  }
  for (const auto &entry : ck.header["tensors"]) {
    const std::string name = entry.at("name").get<std::string>();
    const int64_t rows = entry.at("rows").get<int64_t>(), cols = entry.at("cols").get<int64_t>();
    if (rows < 0 || cols < 0) throw DataError(where + ": negative shape for " + name);
    Matrix t(rows, cols);
    if (!in.read(reinterpret_cast<char *>(t.data()),
                 static_cast<std::streamsize>(t.size() * sizeof(double)))) {
      throw DataError(where + ": truncated payload for tensor " + name);
    }
    ck.tensors.emplace(name, std::move(t));
  }
  ck.header.erase("tensors");
  return ck;
}

void Checkpoint::ExportParameters(const ParameterStore &store, const std::string &prefix) {
  for (const auto &[name, p] : store.all()) tensors[prefix + name] = p.value;
}

void Checkpoint::ImportParameters(ParameterStore *store, const std::string &prefix) const {
  for (auto &[name, p] : store->all()) {
    auto it = tensors.find(prefix + name);
    if (it == tensors.end()) throw DataError("checkpoint lacks parameter " + prefix + name);
    if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols()) {
      throw DataError("checkpoint parameter " + prefix + name + " has shape " +
                      std::to_string(it->second.rows()) + "x" +
                      std::to_string(it->second.cols()) + ", model expects " +
                      std::to_string(p.value.rows()) + "x" + std::to_string(p.value.cols()));
    }
    p.value = it->second;
  }
  for (const auto &[name, t] : tensors) {
    if (name.rfind(prefix, 0) == 0 && !store->Has(name.substr(prefix.size()))) {
      throw DataError("checkpoint has parameter " + name + " unknown to the model");
    }
  }
}

}  // namespace n2n::nn
