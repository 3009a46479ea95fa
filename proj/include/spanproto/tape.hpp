// Reverse-mode automatic differentiation over small dense matrices.
//
// A Tape owns one computation graph, built per training step and discarded
// after backward(). Nodes are topologically ordered by construction, so the
// backward sweep is a single reverse pass. Trainable leaves flush their
// adjoints into a ParameterRegistry.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spanproto/mat.hpp"
#include "spanproto/params.hpp"

namespace spanproto {

class Tape;

struct Var {
  Tape* tape = nullptr;
  int id = -1;
  int rows = 0;
  int cols = 0;

  bool valid() const { return tape != nullptr; }
};

class Tape {
 public:
  // back(tape, self) accumulates self's adjoint into its parents' adjoints.
  using BackFn = std::function<void(Tape&, int)>;

  Var input(Mat value);
  Var scalar(double v);
  // Trainable leaf; backward accumulates into registry.at(index).grad.
  Var param(ParameterRegistry& registry, int index);
  Var param(ParameterRegistry& registry, const std::string& name);

  Var make(Mat value);
  void set_back(Var v, BackFn fn);

  const Mat& val(Var v) const { return nodes_[static_cast<size_t>(v.id)].value; }
  const Mat& val(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Mat& grad(Var v) const { return nodes_[static_cast<size_t>(v.id)].adjoint; }
  Mat& grad_mut(int id) { return nodes_[static_cast<size_t>(id)].adjoint; }

  // Seeds d(loss)=1 and sweeps the graph in reverse. loss must be 1x1.
  void backward(Var loss);

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat adjoint;
    BackFn back;
    ParameterRegistry* registry = nullptr;
    int param_index = -1;
  };
  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Graph operations
// ---------------------------------------------------------------------------

Var add(Var a, Var b);                       // same shape
Var scale(Var a, double c);
Var add_rowvec(Var a, Var v);                // v: 1 x cols, broadcast over rows
Var matmul(Var a, Var b);                    // a (n x k) * b (k x m)
Var matmul_nt(Var a, Var b);                 // a (n x k) * b^T (m x k)
Var tanh_op(Var a);
Var softmax_rows(Var a);
Var gather_rows(Var a, std::vector<int> rows);
Var concat_rows(const std::vector<Var>& parts);
Var outer_sum(Var s);                        // s (L x 1) -> M(i,j) = s_i + s_j

// Row-group means: out(t, :) = mean of rows i with group[i] == t.
// Every group in [0, n_groups) must be non-empty.
Var group_mean(Var a, std::vector<int> group, int n_groups);

// Euclidean distances: out(i, j) = |u_i - c_j|_2.
Var pairwise_dist(Var u, Var c);

// Mean over rows of -log softmax_j(-d(i, j)) evaluated at gold[i].
Var nll_of_neg_distance(Var d, std::vector<int> gold);

// (1 / (rows*cols)) * sum max(0, radius - d(i, j)).
Var hinge_mean(Var d, double radius);

// sum_ij weights(i, j) * a(i, j), a 1x1 result.
Var weighted_sum(Var a, Mat weights);

// log(1 + sum_{cells} exp(sign * f)) over upper-triangle cells, where
// sign = -1 for target cells and +1 otherwise. Log-sum-exp stable; lower
// triangle is excluded, never read.
Var boundary_loss(Var scores, const Mat& target);

}  // namespace spanproto
