#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "srlx/nn/params.hpp"

namespace srlx::nn {

// Eager reverse-mode graph over column vectors and matrices. Nodes compute
// their value at construction; backward() replays registered closures in
// reverse. The op set is fixed to what the models need, shapes are checked
// at every node, and identical call sequences produce identical floating
// point results.
class Graph {
 public:
  using V = int;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  V input(Mat value);
  V scalar(double value);
  V param(Tensor* t);  // one node per tensor, reused on repeat calls

  // row r of a matrix as a column vector
  V row(V m, int r);
  V matvec(V a, V x);   // a * x
  V tmatvec(V a, V x);  // a^T * x (expected embedding under relaxed weights)
  V affine(V w, V x, V b);
  V add(V a, V b);
  V sub(V a, V b);
  V cmul(V a, V b);  // elementwise
  V scale(V a, double s);
  V add_const(V a, double c);
  V concat(const std::vector<V>& parts);
  V slice(V x, int start, int len);
  V tanh_(V x);
  V sigmoid(V x);
  V exp_(V x);
  // log(max(x, floor)); gradient zero below the floor
  V log_floor(V x, double floor = 1e-12);
  V softmax(V x);
  V log_softmax(V x);
  V pick(V x, int i);  // scalar element of a vector
  V dot(V a, V b);
  V sum(V x);
  V add_n(const std::vector<V>& terms);  // left-to-right summation order

  const Mat& value(V v) const { return nodes_[check(v)].value; }
  const Mat& grad(V v) const { return nodes_[check(v)].grad; }
  size_t node_count() const { return nodes_.size(); }

  // seeds d(loss)=1 and accumulates into node grads and Tensor::grad
  void backward(V loss);

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> back;  // empty for leaves
  };

  int check(V v) const;
  V emplace(Mat value, std::function<void()> back);
  // id the node under construction will take; for backward closures
  V next_id() const { return static_cast<V>(nodes_.size()); }

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, V> param_nodes_;
};

// rows of an embedding table; throws DataError on out-of-range ids rather
// than substituting anything
std::vector<Graph::V> embed_sequence(Graph& g, Tensor* table,
                                     const std::vector<int>& ids);

}  // namespace srlx::nn
