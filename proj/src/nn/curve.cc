// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/nn/curve.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "n2n/common/error.h"

namespace n2n::nn {

std::string SerializeCurve(const std::vector<CurvePoint> &curve) {
  std::string out;
  for (const auto &p : curve) {
    nlohmann::json j = {{"step", p.step}, {"train_loss", p.train_loss}};
    j["valid_loss"] = p.valid_loss ? nlohmann::json(*p.valid_loss) : nlohmann::json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<CurvePoint> ParseCurve(const std::string &text, const std::string &origin) {
  std::vector<CurvePoint> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CurvePoint p;
      p.step = j.at("step").get<long>();
      p.train_loss = j.at("train_loss").get<double>();
      if (!j.at("valid_loss").is_null()) p.valid_loss = j.at("valid_loss").get<double>();
      out.push_back(p);
    } catch (const nlohmann::json::exception &e) {
      throw DataError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

void WriteCurve(const std::filesystem::path &path, const std::vector<CurvePoint> &curve) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << SerializeCurve(curve);
}

std::vector<CurvePoint> ReadCurve(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseCurve(ss.str(), path.string());
}

double MeanTrainLoss(const std::vector<CurvePoint> &curve, long first, long last) {
  double sum = 0.0;
  long count = 0;
  for (const auto &p : curve) {
    if (p.step >= first && p.step <= last) {
      sum += p.train_loss;
      ++count;
    }
  }
  if (count == 0) throw UsageError("no curve points in the requested step range");
  return sum / static_cast<double>(count);
}

}  // namespace n2n::nn
