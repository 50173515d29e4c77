// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_NN_GRAPH_H_
#define N2N_NN_GRAPH_H_

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace n2n::nn {

using Matrix = Eigen::MatrixXd;

struct Parameter {
  Matrix value;
  Matrix grad;
};

// Named trainable tensors. Iteration order is the sorted name order, which
// keeps optimizer updates and checkpoints deterministic.
class ParameterStore {
 public:
  // Uniform(-scale, scale) initialization.
  Parameter &Add(const std::string &name, Eigen::Index rows, Eigen::Index cols,
                 double scale, std::mt19937_64 &rng);
  Parameter &AddZeros(const std::string &name, Eigen::Index rows,
                      Eigen::Index cols);

  Parameter &Get(const std::string &name);
  const Parameter &Get(const std::string &name) const;
  bool Has(const std::string &name) const { return params_.count(name) > 0; }

  void ZeroGrad();
  size_t NumScalars() const;
  std::map<std::string, Parameter> &all() { return params_; }
  const std::map<std::string, Parameter> &all() const { return params_; }

 private:
  std::map<std::string, Parameter> params_;
};

class Graph;

// Handle to a node on a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph *graph, int id) : graph_(graph), id_(id) {}

  const Matrix &value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
  Graph *graph() const { return graph_; }
  int id() const { return id_; }

 private:
  Graph *graph_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so a reverse
// sweep visits every node after all of its consumers.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph &, const Matrix &grad)>;

  Var Constant(Matrix value);
  // Gradients reaching this leaf are added to `p->grad` by Backward().
  Var Param(Parameter *p);
  // Records an op result; `backward` receives the output gradient and must
  // push gradients to inputs through AccumulateGrad.
  Var Record(Matrix value, std::vector<Var> inputs, BackwardFn backward);

  // Seeds d loss / d loss = 1; `loss` must be 1 x 1.
  void Backward(Var loss);

  const Matrix &value(int id) const { return nodes_[id].value; }
  bool NeedsGrad(Var v) const { return nodes_[v.id()].needs_grad; }
  void AccumulateGrad(Var v, const Matrix &grad);
  template <typename Expr>
  void AccumulateGradExpr(Var v, const Expr &grad) {
    Node &n = nodes_[v.id()];
    if (!n.needs_grad) return;
    if (n.grad.size() == 0) {
      n.grad = grad;
    } else {
      n.grad += grad;
    }
  }
  // Gradient accumulated so far (empty when none arrived).
  const Matrix &grad(Var v) const { return nodes_[v.id()].grad; }
  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    Parameter *param = nullptr;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
};

inline const Matrix &Var::value() const { return graph_->value(id_); }

// Resolves store parameters on a graph: trainable leaves for a mutable
// store, constants for a read-only one. Each name is bound once.
class Binder {
 public:
  Binder(Graph *graph, ParameterStore *store) : graph_(graph), store_(store), cstore_(store) {}
  Binder(Graph *graph, const ParameterStore *store) : graph_(graph), cstore_(store) {}

  Var operator()(const std::string &name);
  Graph &graph() { return *graph_; }
  bool trainable() const { return store_ != nullptr; }

 private:
  Graph *graph_;
  ParameterStore *store_ = nullptr;
  const ParameterStore *cstore_;
  std::map<std::string, Var> bound_;
};

}  // namespace n2n::nn

#endif  // N2N_NN_GRAPH_H_
