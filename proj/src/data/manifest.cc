// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/data/manifest.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "n2n/common/error.h"

namespace n2n::data {
namespace {

using PathField = std::string MixManifestEntry::*;
constexpr PathField kPathFields[] = {&MixManifestEntry::speech_path,
                                     &MixManifestEntry::noise_path,
                                     &MixManifestEntry::mixture_path,
                                     &MixManifestEntry::scaled_noise_path};

bool EntryLess(const MixManifestEntry &a, const MixManifestEntry &b) {
  if (a.utterance_id != b.utterance_id) return a.utterance_id < b.utterance_id;
  return a.split < b.split;
}

nlohmann::json ToJson(const MixManifestEntry &e) {
  return {{"utterance_id", e.utterance_id},
          {"speaker_id", e.speaker_id},
          {"content_id", e.content_id},
          {"speech_path", e.speech_path},
          {"noise_id", e.noise_id},
          {"noise_path", e.noise_path},
          {"noise_category", e.noise_category},
          {"snr_db", e.snr_db},
          {"split", SplitName(e.split)},
          {"clip_seed", e.clip_seed},
          {"noise_offset", e.noise_offset},
          {"mixture_path", e.mixture_path},
          {"scaled_noise_path", e.scaled_noise_path},
          {"gain", e.gain},
          {"clipped_samples", e.clipped_samples}};
}

MixManifestEntry FromJson(const nlohmann::json &j) {
  MixManifestEntry e;
  e.utterance_id = j.at("utterance_id").get<std::string>();
  e.speaker_id = j.at("speaker_id").get<std::string>();
  e.content_id = j.at("content_id").get<std::string>();
  e.speech_path = j.at("speech_path").get<std::string>();
  e.noise_id = j.at("noise_id").get<std::string>();
  e.noise_path = j.at("noise_path").get<std::string>();
  e.noise_category = j.at("noise_category").get<std::string>();
  e.snr_db = j.at("snr_db").get<double>();
  e.split = ParseSplit(j.at("split").get<std::string>());
  e.clip_seed = j.at("clip_seed").get<uint64_t>();
  e.noise_offset = j.at("noise_offset").get<uint64_t>();
  e.mixture_path = j.at("mixture_path").get<std::string>();
  e.scaled_noise_path = j.at("scaled_noise_path").get<std::string>();
  e.gain = j.at("gain").get<double>();
  e.clipped_samples = j.at("clipped_samples").get<uint64_t>();
  return e;
}

}  // namespace

std::string SplitName(Split split) { return split == Split::kTrain ? "train" : "eval"; }

Split ParseSplit(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "eval") return Split::kEval;
  throw DataError("unknown split: \"" + name + "\"");
}

std::string SerializeManifest(const MixManifest &manifest) {
  MixManifest sorted = manifest;
  std::sort(sorted.begin(), sorted.end(), EntryLess);
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (!EntryLess(sorted[i - 1], sorted[i])) {
      throw DataError("duplicate manifest entry: " + sorted[i].utterance_id + " (" +
                      SplitName(sorted[i].split) + ")");
    }
  }
  std::string out;
  for (const auto &e : sorted) out += ToJson(e).dump() + "\n";
  return out;
}

MixManifest ParseManifest(const std::string &text, const std::string &origin) {
  MixManifest out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(FromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception &e) {
      throw DataError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  std::set<std::pair<std::string, Split>> seen;
  for (const auto &e : out) {
    if (!seen.emplace(e.utterance_id, e.split).second) {
      throw DataError(origin + ": duplicate entry " + e.utterance_id);
    }
  }
  return out;
}

void WriteManifest(const std::filesystem::path &path, const MixManifest &manifest) {
  const auto base = std::filesystem::absolute(path).parent_path();
  MixManifest rel = manifest;
  for (auto &e : rel) {
    for (PathField f : kPathFields) {
      if (!(e.*f).empty()) {
        e.*f = std::filesystem::absolute(e.*f).lexically_normal().lexically_relative(base)
                   .generic_string();
      }
    }
  }
  std::filesystem::create_directories(base);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << SerializeManifest(rel);
}

MixManifest ReadManifest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  MixManifest out = ParseManifest(ss.str(), path.string());
  if (out.empty()) throw DataError("empty manifest " + path.string());
  const auto base = std::filesystem::absolute(path).parent_path();
  for (auto &e : out) {
    for (PathField f : kPathFields) {
      if (!(e.*f).empty() && std::filesystem::path(e.*f).is_relative()) {
        e.*f = (base / (e.*f)).lexically_normal().string();
      }
    }
  }
  return out;
}

MixManifest Filter(const MixManifest &manifest, Split split) {
  MixManifest out;
  for (const auto &e : manifest) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

}  // namespace n2n::data
