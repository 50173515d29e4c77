// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_NN_OPS_H_
#define N2N_NN_OPS_H_

#include <span>
#include <vector>

#include "n2n/nn/graph.h"
#include "n2n/signal/signal_config.h"

// Differentiable ops. Convention: features along rows, positions (time,
// frequency-time, batch) along columns. A C-channel H x W map is a
// C x (H * W) matrix with column index h * W + w.
namespace n2n::nn {

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);  // element-wise
Var Scale(Var a, double s);
Var MatMul(Var a, Var b);
// x (R x N) + bias (R x 1) broadcast over columns.
Var AddBias(Var x, Var bias);
// weight * x + bias.
Var Linear(Var x, Var weight, Var bias);

Var Tanh(Var a);
Var Sigmoid(Var a);
Var Relu(Var a);
Var LeakyRelu(Var a, double slope = 0.2);

Var ConcatRows(const std::vector<Var> &parts);
Var SliceRows(Var a, Eigen::Index start, Eigen::Index count);
Var ConcatCols(const std::vector<Var> &parts);
Var SliceCols(Var a, Eigen::Index start, Eigen::Index count);
// out.col(j) = a.col(index[j]); gradients scatter-add back.
Var GatherCols(Var a, std::vector<int> index);
// Batch-fastest interleave of equal-shaped parts:
// out.col(t * B + b) = parts[b].col(t).
Var InterleaveCols(const std::vector<Var> &parts);
// Reverse of InterleaveCols for B parts; returns part `b`.
Var DeinterleaveCols(Var a, int batch, int b);
// Column-major reinterpretation.
Var Reshape(Var a, Eigen::Index rows, Eigen::Index cols);
// C x (H * W) -> (C * H) x W, row index c * H + h.
Var SpatialToSequence(Var x, int channels, int height, int width);
Var SequenceToSpatial(Var x, int channels, int height, int width);

Var Sum(Var a);
Var Mean(Var a);
Var MeanSquare(Var a);
// Gradient is blocked: value passes, nothing flows back.
Var StopGradient(Var a);
// Value is exactly `replacement`; the gradient is copied to `a` unchanged.
Var StraightThrough(Var a, const Matrix &replacement);

struct ConvGeometry {
  int in_channels = 1;
  int out_channels = 1;
  int height = 1;  // input height
  int width = 1;   // input width
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  int pad_top = 0;
  int pad_bottom = 0;
  int pad_left = 0;
  int pad_right = 0;

  int out_height() const {
    return (height + pad_top + pad_bottom - kernel_h) / stride_h + 1;
  }
  int out_width() const {
    return (width + pad_left + pad_right - kernel_w) / stride_w + 1;
  }
  int patch_size() const { return in_channels * kernel_h * kernel_w; }
};

// Patch matrix (Cin * kh * kw) x (Ho * Wo); zero outside the padded map.
Matrix Im2Col(const Matrix &x, const ConvGeometry &g);
// Adjoint of Im2Col: (Cin * kh * kw) x (Ho * Wo) -> Cin x (H * W).
Matrix Col2Im(const Matrix &cols, const ConvGeometry &g);

// weight: Cout x (Cin * kh * kw), bias: Cout x 1.
Var Conv2d(Var x, Var weight, Var bias, const ConvGeometry &g);

// Complex maps are stacked [real; imag] along rows (2C x HW). Weights are
// split into real and imaginary parts: (Wr + iWi) * (Xr + iXi).
Var ComplexConv2d(Var x, Var weight_re, Var weight_im, Var bias_re,
                  Var bias_im, const ConvGeometry &g);

// Transposed convolution. `g` is the geometry of the forward convolution this
// op is the adjoint of: that convolution maps the result shape
// (g.in_channels x g.height x g.width) to the shape of `x`
// (g.out_channels x g.out_height() x g.out_width()).
// weight: g.out_channels x (g.in_channels * kh * kw); bias: g.in_channels x 1.
Var ConvTranspose2d(Var x, Var weight, Var bias, const ConvGeometry &g);
Var ComplexConvTranspose2d(Var x, Var weight_re, Var weight_im, Var bias_re,
                           Var bias_im, const ConvGeometry &g);

// GRU over `batch` interleaved sequences. x: I x (T * B), column t * B + b.
// Returns hidden states H x (T * B); the initial state is zero.
// Gate layout in the 3H rows: reset, update, candidate.
Var Gru(Var x, Var w_input, Var w_hidden, Var b_input, Var b_hidden, int batch);
// Single inference step with the same arithmetic as Gru. `gx` holds the
// input gates w_input * x + b_input (3H x B); `h` (H x B) is updated.
void GruStep(const Matrix &gx, const Matrix &w_hidden, const Matrix &b_hidden, Matrix *h);

// Mean categorical cross-entropy of logits (C x N) against class targets.
Var SoftmaxCrossEntropy(Var logits, std::span<const int> targets);

// Negative SD-SDR / SI-SNR of a 1 x T estimate against a fixed reference.
Var SdSdrLoss(Var estimate, std::span<const double> reference);
Var SiSnrLoss(Var estimate, std::span<const double> reference);

// Complex ratio mask with magnitude bounded by tanh: S = Y * tanh(|M|) M/|M|.
// m and y are stacked [re; im] (2 x L). Returns stacked S.
Var BoundedComplexMask(Var m, const Matrix &y);

// Inverse STFT of a 1-channel spectrum map stacked [re; im] with layout
// (bins x frames, column index k * frames + f), full padding, trimmed to
// `length` samples. Output is 1 x length.
Var Istft(Var spec, const signal::SignalConfig &config, size_t length);

}  // namespace n2n::nn

#endif  // N2N_NN_OPS_H_
