// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_NN_CHECKPOINT_H_
#define N2N_NN_CHECKPOINT_H_

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "n2n/nn/graph.h"

namespace n2n::nn {

// Binary container: "N2NCKPT1", u32 version, u64 header size, JSON header,
// then little-endian float64 tensor payloads in header index order.
struct Checkpoint {
  static constexpr uint32_t kVersion = 1;

  nlohmann::json header = nlohmann::json::object();
  std::map<std::string, Matrix> tensors;

  void Save(const std::filesystem::path &path) const;
  // Throws DataError naming the file on any structural problem.
  static Checkpoint Load(const std::filesystem::path &path);

  // Copies every parameter in `store` out of `tensors` under `prefix`,
  // checking that names and shapes agree exactly in both directions.
  void ExportParameters(const ParameterStore &store, const std::string &prefix);
  void ImportParameters(ParameterStore *store, const std::string &prefix) const;
};

}  // namespace n2n::nn

#endif  // N2N_NN_CHECKPOINT_H_
