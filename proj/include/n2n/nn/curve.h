// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_NN_CURVE_H_
#define N2N_NN_CURVE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace n2n::nn {

struct CurvePoint {
  long step = 0;
  double train_loss = 0.0;
  std::optional<double> valid_loss;

  friend bool operator==(const CurvePoint &, const CurvePoint &) = default;
};

// Line-delimited {"step", "train_loss", "valid_loss"} records; valid_loss is
// null on steps without validation.
std::string SerializeCurve(const std::vector<CurvePoint> &curve);
std::vector<CurvePoint> ParseCurve(const std::string &text, const std::string &origin);
void WriteCurve(const std::filesystem::path &path, const std::vector<CurvePoint> &curve);
std::vector<CurvePoint> ReadCurve(const std::filesystem::path &path);

// Mean train loss over steps [first, last] (1-based, inclusive, clamped).
double MeanTrainLoss(const std::vector<CurvePoint> &curve, long first, long last);

}  // namespace n2n::nn

#endif  // N2N_NN_CURVE_H_
