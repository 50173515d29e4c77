// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/nn/graph.h"

#include "n2n/common/error.h"

namespace n2n::nn {

Parameter &ParameterStore::Add(const std::string &name, Eigen::Index rows,
                               Eigen::Index cols, double scale,
                               std::mt19937_64 &rng) {
  if (params_.count(name)) throw UsageError("duplicate parameter: " + name);
  std::uniform_real_distribution<double> dist(-scale, scale);
  Parameter p;
  p.value.resize(rows, cols);
  // Fill in a fixed (column-major) order for reproducibility.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) p.value(i, j) = dist(rng);
  }
  p.grad = Matrix::Zero(rows, cols);
  return params_.emplace(name, std::move(p)).first->second;
}

Parameter &ParameterStore::AddZeros(const std::string &name, Eigen::Index rows,
                                    Eigen::Index cols) {
  if (params_.count(name)) throw UsageError("duplicate parameter: " + name);
  Parameter p{Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)};
  return params_.emplace(name, std::move(p)).first->second;
}

Parameter &ParameterStore::Get(const std::string &name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw DataError("missing parameter: " + name);
  return it->second;
}

const Parameter &ParameterStore::Get(const std::string &name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw DataError("missing parameter: " + name);
  return it->second;
}

void ParameterStore::ZeroGrad() {
  for (auto &[name, p] : params_) p.grad.setZero(p.value.rows(), p.value.cols());
}

size_t ParameterStore::NumScalars() const {
  size_t n = 0;
  for (const auto &[name, p] : params_) n += static_cast<size_t>(p.value.size());
  return n;
}

Var Graph::Constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::Param(Parameter *p) {
  Node n;
  n.value = p->value;
  n.param = p;
  n.needs_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::Record(Matrix value, std::vector<Var> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var &in : inputs) {
    if (in.graph() != this) throw UsageError("op mixes vars from different graphs");
    n.needs_grad = n.needs_grad || nodes_[in.id()].needs_grad;
  }
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Graph::AccumulateGrad(Var v, const Matrix &grad) { AccumulateGradExpr(v, grad); }

void Graph::Backward(Var loss) {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw UsageError("Backward expects a scalar loss");
  }
  if (!nodes_[loss.id()].needs_grad) return;
  nodes_[loss.id()].grad = Matrix::Ones(1, 1);
  for (int i = loss.id(); i >= 0; --i) {
    Node &n = nodes_[i];
    if (n.grad.size() == 0) continue;
    // Callbacks only touch nodes with smaller ids, so `n` stays valid.
    if (n.backward) n.backward(*this, n.grad);
    if (n.param) n.param->grad += n.grad;
  }
}

Var Binder::operator()(const std::string &name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  Var v = store_ ? graph_->Param(&store_->Get(name)) : graph_->Constant(cstore_->Get(name).value);
  bound_.emplace(name, v);
  return v;
}

}  // namespace n2n::nn
