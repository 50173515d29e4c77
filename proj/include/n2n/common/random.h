// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_COMMON_RANDOM_H_
#define N2N_COMMON_RANDOM_H_

#include <cstdint>
#include <string>

#include "n2n/common/config.h"

namespace n2n {

// Independent stream seed for a named purpose under a run seed.
inline uint64_t DeriveSeed(uint64_t seed, const std::string &tag) {
  uint64_t h = Fnv1a64(tag) ^ (seed + 0x9e3779b97f4a7c15ULL);
  // splitmix64 finalizer
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

}  // namespace n2n

#endif  // N2N_COMMON_RANDOM_H_
