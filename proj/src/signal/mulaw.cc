// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/signal/mulaw.h"

#include <algorithm>
#include <cmath>

namespace n2n::signal {

double MuLawCompress(double x, int levels) {
  const double mu = levels - 1;
  x = std::clamp(x, -1.0, 1.0);
  return std::copysign(std::log1p(mu * std::abs(x)) / std::log1p(mu), x);
}

double MuLawExpand(double y, int levels) {
  const double mu = levels - 1;
  y = std::clamp(y, -1.0, 1.0);
  return std::copysign(std::expm1(std::abs(y) * std::log1p(mu)) / mu, y);
}

int MuLawEncode(double x, int levels) {
  const int half = levels / 2;
  const long code = std::lround(MuLawCompress(x, levels) * half) + half;
  return static_cast<int>(std::clamp<long>(code, 0, levels - 1));
}

double MuLawDecode(int code, int levels) {
  const int half = levels / 2;
  code = std::clamp(code, 0, levels - 1);
  return MuLawExpand(static_cast<double>(code - half) / half, levels);
}

std::vector<int> MuLawEncode(std::span<const double> x, int levels) {
  std::vector<int> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = MuLawEncode(x[i], levels);
  return out;
}

std::vector<double> MuLawDecode(std::span<const int> codes, int levels) {
  std::vector<double> out(codes.size());
  for (size_t i = 0; i < codes.size(); ++i) out[i] = MuLawDecode(codes[i], levels);
  return out;
}

}  // namespace n2n::signal
