// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_TESTS_TEST_UTIL_H_
#define N2N_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "n2n/signal/waveform.h"

namespace n2n::testing {

inline std::vector<double> RandomVector(std::mt19937_64 &rng, size_t n,
                                        double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> v(n);
  for (double &x : v) x = dist(rng);
  return v;
}

inline signal::Waveform RandomWave(std::mt19937_64 &rng, size_t n,
                                   double scale = 0.1) {
  return signal::Waveform(RandomVector(rng, n, scale));
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("n2n_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace n2n::testing

#endif  // N2N_TESTS_TEST_UTIL_H_
