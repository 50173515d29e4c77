// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_SIGNAL_MULAW_H_
#define N2N_SIGNAL_MULAW_H_

#include <span>
#include <vector>

namespace n2n::signal {

inline constexpr int kMuLawLevels = 256;

// Mu-law companding with mu = levels - 1. Class levels/2 is exactly zero;
// inputs are clamped to [-1, 1] and +1 lands in the top class.
double MuLawCompress(double x, int levels = kMuLawLevels);
double MuLawExpand(double y, int levels = kMuLawLevels);
int MuLawEncode(double x, int levels = kMuLawLevels);
double MuLawDecode(int code, int levels = kMuLawLevels);

std::vector<int> MuLawEncode(std::span<const double> x,
                             int levels = kMuLawLevels);
std::vector<double> MuLawDecode(std::span<const int> codes,
                                int levels = kMuLawLevels);

}  // namespace n2n::signal

#endif  // N2N_SIGNAL_MULAW_H_
