// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/nn/ops.h"

#include <cmath>

#include "n2n/common/error.h"
#include "n2n/signal/metrics.h"
#include "n2n/signal/spectral.h"

namespace n2n::nn {
namespace {

void CheckSameShape(Var a, Var b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw UsageError(std::string(op) + ": shape mismatch (" +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

Graph &G(Var v) { return *v.graph(); }

}  // namespace

Var Add(Var a, Var b) {
  CheckSameShape(a, b, "Add");
  return G(a).Record(a.value() + b.value(), {a, b},
                     [a, b](Graph &g, const Matrix &d) {
                       g.AccumulateGrad(a, d);
                       g.AccumulateGrad(b, d);
                     });
}

Var Sub(Var a, Var b) {
  CheckSameShape(a, b, "Sub");
  return G(a).Record(a.value() - b.value(), {a, b},
                     [a, b](Graph &g, const Matrix &d) {
                       g.AccumulateGrad(a, d);
                       g.AccumulateGradExpr(b, -d);
                     });
}

Var Mul(Var a, Var b) {
  CheckSameShape(a, b, "Mul");
  return G(a).Record(a.value().cwiseProduct(b.value()), {a, b},
                     [a, b](Graph &g, const Matrix &d) {
                       g.AccumulateGradExpr(a, d.cwiseProduct(b.value()));
                       g.AccumulateGradExpr(b, d.cwiseProduct(a.value()));
                     });
}

Var Scale(Var a, double s) {
  return G(a).Record(a.value() * s, {a}, [a, s](Graph &g, const Matrix &d) {
    g.AccumulateGradExpr(a, d * s);
  });
}

Var MatMul(Var a, Var b) {
  if (a.cols() != b.rows()) throw UsageError("MatMul: inner dimensions differ");
  return G(a).Record(a.value() * b.value(), {a, b},
                     [a, b](Graph &g, const Matrix &d) {
                       if (g.NeedsGrad(a)) {
                         g.AccumulateGrad(a, d * b.value().transpose());
                       }
                       if (g.NeedsGrad(b)) {
                         g.AccumulateGrad(b, a.value().transpose() * d);
                       }
                     });
}

Var AddBias(Var x, Var bias) {
  if (bias.cols() != 1 || bias.rows() != x.rows()) {
    throw UsageError("AddBias: bias must be rows x 1");
  }
  Matrix out = x.value().colwise() + bias.value().col(0);
  return G(x).Record(std::move(out), {x, bias},
                     [x, bias](Graph &g, const Matrix &d) {
                       g.AccumulateGrad(x, d);
                       if (g.NeedsGrad(bias)) {
                         g.AccumulateGrad(bias, d.rowwise().sum());
                       }
                     });
}

Var Linear(Var x, Var weight, Var bias) {
  return AddBias(MatMul(weight, x), bias);
}

Var Tanh(Var a) {
  Matrix out = a.value().array().tanh();
  return G(a).Record(out, {a}, [a, out](Graph &g, const Matrix &d) {
    g.AccumulateGradExpr(a, (d.array() * (1.0 - out.array().square())).matrix());
  });
}

Var Sigmoid(Var a) {
  Matrix out = (1.0 + (-a.value().array()).exp()).inverse();
  return G(a).Record(out, {a}, [a, out](Graph &g, const Matrix &d) {
    g.AccumulateGradExpr(a,
                         (d.array() * out.array() * (1.0 - out.array())).matrix());
  });
}

Var Relu(Var a) {
  Matrix out = a.value().cwiseMax(0.0);
  return G(a).Record(out, {a}, [a](Graph &g, const Matrix &d) {
    g.AccumulateGradExpr(
        a, (a.value().array() > 0.0).select(d.array(), 0.0).matrix());
  });
}

Var LeakyRelu(Var a, double slope) {
  Matrix out = (a.value().array() > 0.0).select(a.value().array(),
                                                slope * a.value().array());
  return G(a).Record(out, {a}, [a, slope](Graph &g, const Matrix &d) {
    g.AccumulateGradExpr(
        a, (a.value().array() > 0.0).select(d.array(), slope * d.array()).matrix());
  });
}

Var ConcatRows(const std::vector<Var> &parts) {
  if (parts.empty()) throw UsageError("ConcatRows: no inputs");
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts[0].cols();
  for (const Var &p : parts) {
    if (p.cols() != cols) throw UsageError("ConcatRows: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var &p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return G(parts[0]).Record(std::move(out), parts,
                            [parts](Graph &g, const Matrix &d) {
                              Eigen::Index at = 0;
                              for (const Var &p : parts) {
                                g.AccumulateGradExpr(p, d.middleRows(at, p.rows()));
                                at += p.rows();
                              }
                            });
}

Var SliceRows(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw UsageError("SliceRows: out of range");
  }
  return G(a).Record(a.value().middleRows(start, count), {a},
                     [a, start, count](Graph &g, const Matrix &d) {
                       Matrix full = Matrix::Zero(a.rows(), a.cols());
                       full.middleRows(start, count) = d;
                       g.AccumulateGrad(a, full);
                     });
}

Var ConcatCols(const std::vector<Var> &parts) {
  if (parts.empty()) throw UsageError("ConcatCols: no inputs");
  Eigen::Index cols = 0;
  const Eigen::Index rows = parts[0].rows();
  for (const Var &p : parts) {
    if (p.rows() != rows) throw UsageError("ConcatCols: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var &p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return G(parts[0]).Record(std::move(out), parts,
                            [parts](Graph &g, const Matrix &d) {
                              Eigen::Index at = 0;
                              for (const Var &p : parts) {
                                g.AccumulateGradExpr(p, d.middleCols(at, p.cols()));
                                at += p.cols();
                              }
                            });
}

Var SliceCols(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw UsageError("SliceCols: out of range");
  }
  return G(a).Record(a.value().middleCols(start, count), {a},
                     [a, start, count](Graph &g, const Matrix &d) {
                       Matrix full = Matrix::Zero(a.rows(), a.cols());
                       full.middleCols(start, count) = d;
                       g.AccumulateGrad(a, full);
                     });
}

Var GatherCols(Var a, std::vector<int> index) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(index.size()));
  for (size_t j = 0; j < index.size(); ++j) {
    if (index[j] < 0 || index[j] >= a.cols()) {
      throw UsageError("GatherCols: index out of range");
    }
    out.col(j) = a.value().col(index[j]);
  }
  return G(a).Record(std::move(out), {a},
                     [a, index = std::move(index)](Graph &g, const Matrix &d) {
                       Matrix full = Matrix::Zero(a.rows(), a.cols());
                       for (size_t j = 0; j < index.size(); ++j) {
                         full.col(index[j]) += d.col(j);
                       }
                       g.AccumulateGrad(a, full);
                     });
}

Var InterleaveCols(const std::vector<Var> &parts) {
  if (parts.empty()) throw UsageError("InterleaveCols: no inputs");
  const Eigen::Index rows = parts[0].rows(), steps = parts[0].cols();
  const Eigen::Index batch = static_cast<Eigen::Index>(parts.size());
  for (const Var &p : parts) {
    if (p.rows() != rows || p.cols() != steps) {
      throw UsageError("InterleaveCols: parts must share a shape");
    }
  }
  Matrix out(rows, steps * batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (Eigen::Index t = 0; t < steps; ++t) {
      out.col(t * batch + b) = parts[b].value().col(t);
    }
  }
  return G(parts[0]).Record(std::move(out), parts,
                            [parts, steps, batch](Graph &g, const Matrix &d) {
                              for (Eigen::Index b = 0; b < batch; ++b) {
                                if (!g.NeedsGrad(parts[b])) continue;
                                Matrix part(d.rows(), steps);
                                for (Eigen::Index t = 0; t < steps; ++t) {
                                  part.col(t) = d.col(t * batch + b);
                                }
                                g.AccumulateGrad(parts[b], part);
                              }
                            });
}

Var DeinterleaveCols(Var a, int batch, int b) {
  if (batch <= 0 || a.cols() % batch != 0 || b < 0 || b >= batch) {
    throw UsageError("DeinterleaveCols: bad batch layout");
  }
  std::vector<int> index(a.cols() / batch);
  for (size_t t = 0; t < index.size(); ++t) {
    index[t] = static_cast<int>(t) * batch + b;
  }
  return GatherCols(a, std::move(index));
}

Var Reshape(Var a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.value().size()) throw UsageError("Reshape: size mismatch");
  Matrix out = Eigen::Map<const Matrix>(a.value().data(), rows, cols);
  const Eigen::Index r0 = a.rows(), c0 = a.cols();
  return G(a).Record(std::move(out), {a}, [a, r0, c0](Graph &g, const Matrix &d) {
    g.AccumulateGrad(a, Eigen::Map<const Matrix>(d.data(), r0, c0));
  });
}

namespace {

Matrix ToSequence(const Matrix &x, int c_n, int h_n, int w_n) {
  Matrix out(static_cast<Eigen::Index>(c_n) * h_n, w_n);
  for (int c = 0; c < c_n; ++c) {
    for (int h = 0; h < h_n; ++h) {
      for (int w = 0; w < w_n; ++w) out(c * h_n + h, w) = x(c, h * w_n + w);
    }
  }
  return out;
}

Matrix ToSpatial(const Matrix &x, int c_n, int h_n, int w_n) {
  Matrix out(c_n, static_cast<Eigen::Index>(h_n) * w_n);
  for (int c = 0; c < c_n; ++c) {
    for (int h = 0; h < h_n; ++h) {
      for (int w = 0; w < w_n; ++w) out(c, h * w_n + w) = x(c * h_n + h, w);
    }
  }
  return out;
}

}  // namespace

Var SpatialToSequence(Var x, int channels, int height, int width) {
  if (x.rows() != channels || x.cols() != static_cast<Eigen::Index>(height) * width) {
    throw UsageError("SpatialToSequence: shape mismatch");
  }
  return G(x).Record(ToSequence(x.value(), channels, height, width), {x},
                     [=](Graph &g, const Matrix &d) {
                       g.AccumulateGrad(x, ToSpatial(d, channels, height, width));
                     });
}

Var SequenceToSpatial(Var x, int channels, int height, int width) {
  if (x.rows() != static_cast<Eigen::Index>(channels) * height || x.cols() != width) {
    throw UsageError("SequenceToSpatial: shape mismatch");
  }
  return G(x).Record(ToSpatial(x.value(), channels, height, width), {x},
                     [=](Graph &g, const Matrix &d) {
                       g.AccumulateGrad(x, ToSequence(d, channels, height, width));
                     });
}

Var Sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return G(a).Record(std::move(out), {a}, [a](Graph &g, const Matrix &d) {
    g.AccumulateGradExpr(a, Matrix::Constant(a.rows(), a.cols(), d(0, 0)));
  });
}

Var Mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return Scale(Sum(a), 1.0 / n);
}

Var MeanSquare(Var a) {
  const double n = static_cast<double>(a.value().size());
  Matrix out(1, 1);
  out(0, 0) = a.value().squaredNorm() / n;
  return G(a).Record(std::move(out), {a}, [a, n](Graph &g, const Matrix &d) {
    g.AccumulateGradExpr(a, a.value() * (2.0 * d(0, 0) / n));
  });
}

Var StopGradient(Var a) { return G(a).Constant(a.value()); }

Var StraightThrough(Var a, const Matrix &replacement) {
  if (replacement.rows() != a.rows() || replacement.cols() != a.cols()) {
    throw UsageError("StraightThrough: shape mismatch");
  }
  return G(a).Record(replacement, {a}, [a](Graph &g, const Matrix &d) { g.AccumulateGrad(a, d); });
}

Matrix Im2Col(const Matrix &x, const ConvGeometry &g) {
  const int ho = g.out_height(), wo = g.out_width();
  Matrix cols = Matrix::Zero(g.patch_size(), static_cast<Eigen::Index>(ho) * wo);
  for (int oh = 0; oh < ho; ++oh) {
    for (int ow = 0; ow < wo; ++ow) {
      const Eigen::Index col = static_cast<Eigen::Index>(oh) * wo + ow;
      for (int c = 0; c < g.in_channels; ++c) {
        for (int i = 0; i < g.kernel_h; ++i) {
          const int h = oh * g.stride_h - g.pad_top + i;
          if (h < 0 || h >= g.height) continue;
          for (int j = 0; j < g.kernel_w; ++j) {
            const int w = ow * g.stride_w - g.pad_left + j;
            if (w < 0 || w >= g.width) continue;
            cols((c * g.kernel_h + i) * g.kernel_w + j, col) = x(c, h * g.width + w);
          }
        }
      }
    }
  }
  return cols;
}

Matrix Col2Im(const Matrix &cols, const ConvGeometry &g) {
  const int ho = g.out_height(), wo = g.out_width();
  Matrix x = Matrix::Zero(g.in_channels, static_cast<Eigen::Index>(g.height) * g.width);
  for (int oh = 0; oh < ho; ++oh) {
    for (int ow = 0; ow < wo; ++ow) {
      const Eigen::Index col = static_cast<Eigen::Index>(oh) * wo + ow;
      for (int c = 0; c < g.in_channels; ++c) {
        for (int i = 0; i < g.kernel_h; ++i) {
          const int h = oh * g.stride_h - g.pad_top + i;
          if (h < 0 || h >= g.height) continue;
          for (int j = 0; j < g.kernel_w; ++j) {
            const int w = ow * g.stride_w - g.pad_left + j;
            if (w < 0 || w >= g.width) continue;
            x(c, h * g.width + w) += cols((c * g.kernel_h + i) * g.kernel_w + j, col);
          }
        }
      }
    }
  }
  return x;
}

namespace {

void CheckConvInput(Var x, const ConvGeometry &g, int channel_factor,
                    const char *op) {
  if (x.rows() != static_cast<Eigen::Index>(g.in_channels) * channel_factor ||
      x.cols() != static_cast<Eigen::Index>(g.height) * g.width) {
    throw UsageError(std::string(op) + ": input shape does not match geometry");
  }
  if (g.out_height() < 1 || g.out_width() < 1) {
    throw UsageError(std::string(op) + ": empty output");
  }
}

void CheckTransposeInput(Var x, const ConvGeometry &g, int channel_factor,
                         const char *op) {
  if (x.rows() != static_cast<Eigen::Index>(g.out_channels) * channel_factor ||
      x.cols() != static_cast<Eigen::Index>(g.out_height()) * g.out_width()) {
    throw UsageError(std::string(op) + ": input shape does not match geometry");
  }
}

}  // namespace

Var Conv2d(Var x, Var weight, Var bias, const ConvGeometry &g) {
  CheckConvInput(x, g, 1, "Conv2d");
  if (weight.rows() != g.out_channels || weight.cols() != g.patch_size()) {
    throw UsageError("Conv2d: weight shape mismatch");
  }
  Matrix cols = Im2Col(x.value(), g);
  Matrix out = weight.value() * cols;
  out.colwise() += bias.value().col(0);
  return G(x).Record(std::move(out), {x, weight, bias},
                     [x, weight, bias, g, cols = std::move(cols)](
                         Graph &gr, const Matrix &d) {
                       if (gr.NeedsGrad(weight)) {
                         gr.AccumulateGrad(weight, d * cols.transpose());
                       }
                       if (gr.NeedsGrad(bias)) gr.AccumulateGrad(bias, d.rowwise().sum());
                       if (gr.NeedsGrad(x)) {
                         gr.AccumulateGrad(x, Col2Im(weight.value().transpose() * d, g));
                       }
                     });
}

Var ComplexConv2d(Var x, Var wr, Var wi, Var br, Var bi, const ConvGeometry &g) {
  CheckConvInput(x, g, 2, "ComplexConv2d");
  const int cin = g.in_channels, cout = g.out_channels;
  Matrix cr = Im2Col(x.value().topRows(cin), g);
  Matrix ci = Im2Col(x.value().bottomRows(cin), g);
  Matrix out(2 * cout, cr.cols());
  out.topRows(cout) = wr.value() * cr - wi.value() * ci;
  out.topRows(cout).colwise() += br.value().col(0);
  out.bottomRows(cout) = wi.value() * cr + wr.value() * ci;
  out.bottomRows(cout).colwise() += bi.value().col(0);
  return G(x).Record(
      std::move(out), {x, wr, wi, br, bi},
      [=, cr = std::move(cr), ci = std::move(ci)](Graph &gr, const Matrix &d) {
        const auto dr = d.topRows(cout);
        const auto di = d.bottomRows(cout);
        if (gr.NeedsGrad(wr)) {
          gr.AccumulateGrad(wr, dr * cr.transpose() + di * ci.transpose());
        }
        if (gr.NeedsGrad(wi)) {
          gr.AccumulateGrad(wi, di * cr.transpose() - dr * ci.transpose());
        }
        if (gr.NeedsGrad(br)) gr.AccumulateGrad(br, dr.rowwise().sum());
        if (gr.NeedsGrad(bi)) gr.AccumulateGrad(bi, di.rowwise().sum());
        if (gr.NeedsGrad(x)) {
          const Matrix dcr = wr.value().transpose() * dr + wi.value().transpose() * di;
          const Matrix dci = wr.value().transpose() * di - wi.value().transpose() * dr;
          Matrix dx(2 * cin, x.cols());
          dx.topRows(cin) = Col2Im(dcr, g);
          dx.bottomRows(cin) = Col2Im(dci, g);
          gr.AccumulateGrad(x, dx);
        }
      });
}

Var ConvTranspose2d(Var x, Var weight, Var bias, const ConvGeometry &g) {
  CheckTransposeInput(x, g, 1, "ConvTranspose2d");
  if (weight.rows() != g.out_channels || weight.cols() != g.patch_size()) {
    throw UsageError("ConvTranspose2d: weight shape mismatch");
  }
  Matrix out = Col2Im(weight.value().transpose() * x.value(), g);
  out.colwise() += bias.value().col(0);
  return G(x).Record(std::move(out), {x, weight, bias},
                     [x, weight, bias, g](Graph &gr, const Matrix &d) {
                       const Matrix dcols = Im2Col(d, g);
                       if (gr.NeedsGrad(weight)) {
                         gr.AccumulateGrad(weight, x.value() * dcols.transpose());
                       }
                       if (gr.NeedsGrad(bias)) gr.AccumulateGrad(bias, d.rowwise().sum());
                       if (gr.NeedsGrad(x)) gr.AccumulateGrad(x, weight.value() * dcols);
                     });
}

Var ComplexConvTranspose2d(Var x, Var wr, Var wi, Var br, Var bi,
                           const ConvGeometry &g) {
  CheckTransposeInput(x, g, 2, "ComplexConvTranspose2d");
  const int cx = g.out_channels, cy = g.in_channels;
  const auto xr = x.value().topRows(cx);
  const auto xi = x.value().bottomRows(cx);
  Matrix out(2 * cy, static_cast<Eigen::Index>(g.height) * g.width);
  out.topRows(cy) = Col2Im(wr.value().transpose() * xr - wi.value().transpose() * xi, g);
  out.topRows(cy).colwise() += br.value().col(0);
  out.bottomRows(cy) = Col2Im(wi.value().transpose() * xr + wr.value().transpose() * xi, g);
  out.bottomRows(cy).colwise() += bi.value().col(0);
  return G(x).Record(std::move(out), {x, wr, wi, br, bi},
                     [=](Graph &gr, const Matrix &d) {
                       const Matrix dcr = Im2Col(d.topRows(cy), g);
                       const Matrix dci = Im2Col(d.bottomRows(cy), g);
                       const auto xr = x.value().topRows(cx);
                       const auto xi = x.value().bottomRows(cx);
                       if (gr.NeedsGrad(wr)) {
                         gr.AccumulateGrad(wr, xr * dcr.transpose() + xi * dci.transpose());
                       }
                       if (gr.NeedsGrad(wi)) {
                         gr.AccumulateGrad(wi, xr * dci.transpose() - xi * dcr.transpose());
                       }
                       if (gr.NeedsGrad(br)) gr.AccumulateGrad(br, d.topRows(cy).rowwise().sum());
                       if (gr.NeedsGrad(bi)) {
                         gr.AccumulateGrad(bi, d.bottomRows(cy).rowwise().sum());
                       }
                       if (gr.NeedsGrad(x)) {
                         Matrix dx(2 * cx, x.cols());
                         dx.topRows(cx) = wr.value() * dcr + wi.value() * dci;
                         dx.bottomRows(cx) = wr.value() * dci - wi.value() * dcr;
                         gr.AccumulateGrad(x, dx);
                       }
                     });
}

void GruStep(const Matrix &gx, const Matrix &wh, const Matrix &bh, Matrix *h) {
  const Eigen::Index hidden = wh.cols(), batch = h->cols();
  Matrix gh(3 * hidden, batch);
  gh.noalias() = wh * *h;
  gh.colwise() += bh.col(0);
  const Matrix r =
      (1.0 + (-(gx.topRows(hidden) + gh.topRows(hidden)).array()).exp()).inverse().matrix();
  const Matrix z = (1.0 + (-(gx.middleRows(hidden, hidden) + gh.middleRows(hidden, hidden))
                                 .array())
                              .exp())
                       .inverse()
                       .matrix();
  const Matrix n =
      (gx.bottomRows(hidden).array() + r.array() * gh.bottomRows(hidden).array()).tanh().matrix();
  *h = ((1.0 - z.array()) * n.array() + z.array() * h->array()).matrix();
}

Var Gru(Var x, Var wx, Var wh, Var bx, Var bh, int batch) {
  const Eigen::Index hidden = wh.cols();
  if (wh.rows() != 3 * hidden || wx.rows() != 3 * hidden || wx.cols() != x.rows() ||
      bx.rows() != 3 * hidden || bh.rows() != 3 * hidden) {
    throw UsageError("Gru: parameter shapes inconsistent");
  }
  if (batch <= 0 || x.cols() % batch != 0) throw UsageError("Gru: bad batch");
  const Eigen::Index steps = x.cols() / batch, total = x.cols();

  Matrix gx = wx.value() * x.value();
  gx.colwise() += bx.value().col(0);
  Matrix hs(hidden, total), r(hidden, total), z(hidden, total), n(hidden, total),
      ghn(hidden, total);
  Matrix h = Matrix::Zero(hidden, batch);
  Matrix gh(3 * hidden, batch);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Eigen::Index c0 = t * batch;
    gh.noalias() = wh.value() * h;
    gh.colwise() += bh.value().col(0);
    auto rt = r.middleCols(c0, batch);
    auto zt = z.middleCols(c0, batch);
    auto nt = n.middleCols(c0, batch);
    rt = (1.0 + (-(gx.block(0, c0, hidden, batch) + gh.topRows(hidden)).array()).exp())
             .inverse()
             .matrix();
    zt = (1.0 +
          (-(gx.block(hidden, c0, hidden, batch) + gh.middleRows(hidden, hidden)).array())
              .exp())
             .inverse()
             .matrix();
    ghn.middleCols(c0, batch) = gh.bottomRows(hidden);
    nt = (gx.block(2 * hidden, c0, hidden, batch).array() +
          rt.array() * gh.bottomRows(hidden).array())
             .tanh()
             .matrix();
    h = ((1.0 - zt.array()) * nt.array() + zt.array() * h.array()).matrix();
    hs.middleCols(c0, batch) = h;
  }

  return G(x).Record(
      hs, {x, wx, wh, bx, bh},
      [=](Graph &gr, const Matrix &d) {
        Matrix dgx(3 * hidden, total), dgh(3 * hidden, total);
        Matrix dh_next = Matrix::Zero(hidden, batch);
        Matrix hprev_all = Matrix::Zero(hidden, total);
        if (steps > 1) hprev_all.rightCols(total - batch) = hs.leftCols(total - batch);
        for (Eigen::Index t = steps - 1; t >= 0; --t) {
          const Eigen::Index c0 = t * batch;
          const Matrix dh = d.middleCols(c0, batch) + dh_next;
          const auto rt = r.middleCols(c0, batch).array();
          const auto zt = z.middleCols(c0, batch).array();
          const auto nt = n.middleCols(c0, batch).array();
          const auto hp = hprev_all.middleCols(c0, batch).array();
          const Eigen::ArrayXXd dn = dh.array() * (1.0 - zt);
          const Eigen::ArrayXXd dz = dh.array() * (hp - nt);
          const Eigen::ArrayXXd dan = dn * (1.0 - nt.square());
          const Eigen::ArrayXXd dr = dan * ghn.middleCols(c0, batch).array();
          const Eigen::ArrayXXd dar = dr * rt * (1.0 - rt);
          const Eigen::ArrayXXd daz = dz * zt * (1.0 - zt);
          dgx.block(0, c0, hidden, batch) = dar.matrix();
          dgx.block(hidden, c0, hidden, batch) = daz.matrix();
          dgx.block(2 * hidden, c0, hidden, batch) = dan.matrix();
          dgh.block(0, c0, hidden, batch) = dar.matrix();
          dgh.block(hidden, c0, hidden, batch) = daz.matrix();
          dgh.block(2 * hidden, c0, hidden, batch) = (dan * rt).matrix();
          dh_next = (dh.array() * zt).matrix();
          dh_next.noalias() += wh.value().transpose() * dgh.middleCols(c0, batch);
        }
        if (gr.NeedsGrad(wx)) gr.AccumulateGrad(wx, dgx * x.value().transpose());
        if (gr.NeedsGrad(bx)) gr.AccumulateGrad(bx, dgx.rowwise().sum());
        if (gr.NeedsGrad(wh)) gr.AccumulateGrad(wh, dgh * hprev_all.transpose());
        if (gr.NeedsGrad(bh)) gr.AccumulateGrad(bh, dgh.rowwise().sum());
        if (gr.NeedsGrad(x)) gr.AccumulateGrad(x, wx.value().transpose() * dgx);
      });
}

Var SoftmaxCrossEntropy(Var logits, std::span<const int> targets) {
  const Eigen::Index classes = logits.rows(), n = logits.cols();
  if (static_cast<Eigen::Index>(targets.size()) != n) {
    throw UsageError("SoftmaxCrossEntropy: one target per column required");
  }
  Matrix prob(classes, n);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (targets[j] < 0 || targets[j] >= classes) {
      throw UsageError("SoftmaxCrossEntropy: target out of range");
    }
    const double mx = logits.value().col(j).maxCoeff();
    prob.col(j) = (logits.value().col(j).array() - mx).exp();
    const double z = prob.col(j).sum();
    prob.col(j) /= z;
    loss -= logits.value()(targets[j], j) - mx - std::log(z);
  }
  Matrix out(1, 1);
  out(0, 0) = loss / static_cast<double>(n);
  std::vector<int> tgt(targets.begin(), targets.end());
  return G(logits).Record(
      std::move(out), {logits},
      [logits, prob = std::move(prob), tgt = std::move(tgt)](Graph &g,
                                                             const Matrix &d) {
        Matrix grad = prob;
        for (size_t j = 0; j < tgt.size(); ++j) grad(tgt[j], j) -= 1.0;
        grad *= d(0, 0) / static_cast<double>(tgt.size());
        g.AccumulateGrad(logits, grad);
      });
}

namespace {

template <typename LossFn>
Var RatioLoss(Var estimate, std::span<const double> reference, LossFn fn) {
  if (estimate.rows() != 1) throw UsageError("ratio loss expects a 1 x T estimate");
  const Matrix &e = estimate.value();
  signal::LossWithGradient lg =
      fn(std::span<const double>(e.data(), static_cast<size_t>(e.size())), reference);
  Matrix out(1, 1);
  out(0, 0) = lg.loss;
  Matrix grad = Eigen::Map<const Matrix>(lg.gradient.data(), 1, e.cols());
  return G(estimate).Record(std::move(out), {estimate},
                            [estimate, grad = std::move(grad)](Graph &g,
                                                               const Matrix &d) {
                              g.AccumulateGradExpr(estimate, grad * d(0, 0));
                            });
}

}  // namespace

Var SdSdrLoss(Var estimate, std::span<const double> reference) {
  return RatioLoss(estimate, reference, [](auto e, auto r) {
    return signal::SdSdrLoss(e, r);
  });
}

Var SiSnrLoss(Var estimate, std::span<const double> reference) {
  return RatioLoss(estimate, reference, [](auto e, auto r) {
    return signal::SiSnrLoss(e, r);
  });
}

Var BoundedComplexMask(Var m, const Matrix &y) {
  if (m.rows() != 2 || y.rows() != 2 || m.cols() != y.cols()) {
    throw UsageError("BoundedComplexMask: expected matching 2 x L inputs");
  }
  constexpr double kDelta = 1e-12;
  const Eigen::ArrayXXd mr = m.value().row(0).array(), mi = m.value().row(1).array();
  const Eigen::ArrayXXd yr = y.row(0).array(), yi = y.row(1).array();
  const Eigen::ArrayXXd mag = (mr.square() + mi.square() + kDelta).sqrt();
  const Eigen::ArrayXXd gain = mag.tanh() / mag;
  const Eigen::ArrayXXd qr = gain * mr, qi = gain * mi;
  Matrix out(2, m.cols());
  out.row(0) = (yr * qr - yi * qi).matrix();
  out.row(1) = (yr * qi + yi * qr).matrix();
  return G(m).Record(std::move(out), {m}, [=](Graph &g, const Matrix &d) {
    const Eigen::ArrayXXd dsr = d.row(0).array(), dsi = d.row(1).array();
    const Eigen::ArrayXXd dqr = dsr * yr + dsi * yi;
    const Eigen::ArrayXXd dqi = dsi * yr - dsr * yi;
    const Eigen::ArrayXXd th = mag.tanh();
    // d gain / d mag
    const Eigen::ArrayXXd dgain = ((1.0 - th.square()) * mag - th) / mag.square();
    const Eigen::ArrayXXd common = (dqr * mr + dqi * mi) * dgain / mag;
    Matrix dm(2, mr.cols());
    dm.row(0) = (dqr * gain + common * mr).matrix();
    dm.row(1) = (dqi * gain + common * mi).matrix();
    g.AccumulateGrad(m, dm);
  });
}

Var Istft(Var spec, const signal::SignalConfig &config, size_t length) {
  const int n = config.frame_length, hop = config.hop_length;
  const int bins = config.num_bins();
  const Eigen::Index frames = signal::NumFrames(length, config, signal::StftPadding::kFull);
  if (spec.rows() != 2 || spec.cols() != bins * frames) {
    throw UsageError("Istft: spectrum shape does not match length");
  }
  const signal::DftBasis &basis = signal::GetDftBasis(config.fft_size);
  const Eigen::VectorXd &window = signal::HannWindow(n);
  const int left = signal::LeftPadding(config, signal::StftPadding::kFull);
  const long total = (frames - 1) * hop + n;
  Eigen::VectorXd norm = Eigen::VectorXd::Zero(total);
  for (Eigen::Index f = 0; f < frames; ++f) {
    for (int i = 0; i < n; ++i) norm[f * hop + i] += window[i] * window[i];
  }

  const Matrix row_re = spec.value().row(0), row_im = spec.value().row(1);
  const Matrix s_re = Eigen::Map<const Matrix>(row_re.data(), frames, bins);
  const Matrix s_im = Eigen::Map<const Matrix>(row_im.data(), frames, bins);
  const Matrix time = basis.inverse_re * s_re.transpose() + basis.inverse_im * s_im.transpose();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(total);
  for (Eigen::Index f = 0; f < frames; ++f) {
    for (int i = 0; i < n; ++i) acc[f * hop + i] += time(i, f) * window[i];
  }
  Matrix out(1, static_cast<Eigen::Index>(length));
  for (size_t i = 0; i < length; ++i) {
    const long idx = left + static_cast<long>(i);
    out(0, i) = norm[idx] > 1e-10 ? acc[idx] / norm[idx] : 0.0;
  }
  return G(spec).Record(std::move(out), {spec}, [=](Graph &g, const Matrix &d) {
    Eigen::VectorXd dacc = Eigen::VectorXd::Zero(total);
    for (size_t i = 0; i < length; ++i) {
      const long idx = left + static_cast<long>(i);
      if (norm[idx] > 1e-10) dacc[idx] = d(0, i) / norm[idx];
    }
    Matrix dtime(basis.fft_size, frames);
    dtime.setZero();
    for (Eigen::Index f = 0; f < frames; ++f) {
      for (int i = 0; i < n; ++i) dtime(i, f) = dacc[f * hop + i] * window[i];
    }
    const Matrix dre = (basis.inverse_re.transpose() * dtime).transpose();  // F x K
    const Matrix dim = (basis.inverse_im.transpose() * dtime).transpose();
    Matrix dspec(2, spec.cols());
    dspec.row(0) = Eigen::Map<const Eigen::RowVectorXd>(dre.data(), dre.size());
    dspec.row(1) = Eigen::Map<const Eigen::RowVectorXd>(dim.data(), dim.size());
    g.AccumulateGrad(spec, dspec);
  });
}

}  // namespace n2n::nn
