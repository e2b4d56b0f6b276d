#include "srlx/nn/graph.hpp"

#include <cmath>

namespace srlx::nn {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw DataError(std::string("graph shape error: ") + what);
}

bool is_vector(const Mat& m) { return m.cols() == 1; }

}  // namespace

int Graph::check(V v) const {
  if (v < 0 || static_cast<size_t>(v) >= nodes_.size())
    throw DataError("graph node id out of range");
  return v;
}

Graph::V Graph::emplace(Mat value, std::function<void()> back) {
  nodes_.push_back(Node{std::move(value), Mat(), std::move(back)});
  return static_cast<V>(nodes_.size() - 1);
}

Graph::V Graph::input(Mat value) { return emplace(std::move(value), {}); }

Graph::V Graph::scalar(double value) {
  Mat m(1, 1);
  m(0, 0) = value;
  return emplace(std::move(m), {});
}

Graph::V Graph::param(Tensor* t) {
  auto it = param_nodes_.find(t);
  if (it != param_nodes_.end()) return it->second;
  V v = emplace(t->value,
                [this, t, self = next_id()] { t->grad += nodes_[self].grad; });
  param_nodes_.emplace(t, v);
  return v;
}

Graph::V Graph::row(V m, int r) {
  check(m);
  const Mat& src = nodes_[m].value;
  require(r >= 0 && r < src.rows(), "row index out of range");
  Mat out = src.row(r).transpose();
  return emplace(std::move(out), [this, m, r, self = next_id()] {
    nodes_[m].grad.row(r) += nodes_[self].grad.transpose();
  });
}

Graph::V Graph::matvec(V a, V x) {
  check(a);
  check(x);
  const Mat& A = nodes_[a].value;
  const Mat& X = nodes_[x].value;
  require(is_vector(X) && A.cols() == X.rows(), "matvec dims");
  return emplace(A * X, [this, a, x, self = next_id()] {
    const Mat& g = nodes_[self].grad;
    nodes_[a].grad += g * nodes_[x].value.transpose();
    nodes_[x].grad += nodes_[a].value.transpose() * g;
  });
}

Graph::V Graph::tmatvec(V a, V x) {
  check(a);
  check(x);
  const Mat& A = nodes_[a].value;
  const Mat& X = nodes_[x].value;
  require(is_vector(X) && A.rows() == X.rows(), "tmatvec dims");
  return emplace(A.transpose() * X, [this, a, x, self = next_id()] {
    const Mat& g = nodes_[self].grad;
    nodes_[a].grad += nodes_[x].value * g.transpose();
    nodes_[x].grad += nodes_[a].value * g;
  });
}

Graph::V Graph::affine(V w, V x, V b) {
  check(w);
  check(x);
  check(b);
  const Mat& W = nodes_[w].value;
  const Mat& X = nodes_[x].value;
  const Mat& B = nodes_[b].value;
  require(is_vector(X) && is_vector(B) && W.cols() == X.rows() &&
              W.rows() == B.rows(),
          "affine dims");
  return emplace(W * X + B, [this, w, x, b, self = next_id()] {
    const Mat& g = nodes_[self].grad;
    nodes_[w].grad += g * nodes_[x].value.transpose();
    nodes_[x].grad += nodes_[w].value.transpose() * g;
    nodes_[b].grad += g;
  });
}

Graph::V Graph::add(V a, V b) {
  check(a);
  check(b);
  require(nodes_[a].value.rows() == nodes_[b].value.rows() &&
              nodes_[a].value.cols() == nodes_[b].value.cols(),
          "add dims");
  return emplace(nodes_[a].value + nodes_[b].value,
                 [this, a, b, self = next_id()] {
                   nodes_[a].grad += nodes_[self].grad;
                   nodes_[b].grad += nodes_[self].grad;
                 });
}

Graph::V Graph::sub(V a, V b) {
  check(a);
  check(b);
  require(nodes_[a].value.rows() == nodes_[b].value.rows() &&
              nodes_[a].value.cols() == nodes_[b].value.cols(),
          "sub dims");
  return emplace(nodes_[a].value - nodes_[b].value,
                 [this, a, b, self = next_id()] {
                   nodes_[a].grad += nodes_[self].grad;
                   nodes_[b].grad -= nodes_[self].grad;
                 });
}

Graph::V Graph::cmul(V a, V b) {
  check(a);
  check(b);
  require(nodes_[a].value.rows() == nodes_[b].value.rows() &&
              nodes_[a].value.cols() == nodes_[b].value.cols(),
          "cmul dims");
  return emplace(nodes_[a].value.cwiseProduct(nodes_[b].value),
                 [this, a, b, self = next_id()] {
                   const Mat& g = nodes_[self].grad;
                   nodes_[a].grad += g.cwiseProduct(nodes_[b].value);
                   nodes_[b].grad += g.cwiseProduct(nodes_[a].value);
                 });
}

Graph::V Graph::scale(V a, double s) {
  check(a);
  return emplace(nodes_[a].value * s, [this, a, s, self = next_id()] {
    nodes_[a].grad += nodes_[self].grad * s;
  });
}

Graph::V Graph::add_const(V a, double c) {
  check(a);
  return emplace(nodes_[a].value.array() + c, [this, a, self = next_id()] {
    nodes_[a].grad += nodes_[self].grad;
  });
}

Graph::V Graph::concat(const std::vector<V>& parts) {
  require(!parts.empty(), "concat of nothing");
  int total = 0;
  for (V p : parts) {
    check(p);
    require(is_vector(nodes_[p].value), "concat expects vectors");
    total += static_cast<int>(nodes_[p].value.rows());
  }
  Mat out(total, 1);
  int at = 0;
  for (V p : parts) {
    int n = static_cast<int>(nodes_[p].value.rows());
    out.block(at, 0, n, 1) = nodes_[p].value;
    at += n;
  }
  return emplace(std::move(out), [this, parts, self = next_id()] {
    int at2 = 0;
    for (V p : parts) {
      int n = static_cast<int>(nodes_[p].value.rows());
      nodes_[p].grad += nodes_[self].grad.block(at2, 0, n, 1);
      at2 += n;
    }
  });
}

Graph::V Graph::slice(V x, int start, int len) {
  check(x);
  const Mat& X = nodes_[x].value;
  require(is_vector(X) && start >= 0 && len > 0 && start + len <= X.rows(),
          "slice range");
  return emplace(X.block(start, 0, len, 1),
                 [this, x, start, len, self = next_id()] {
                   nodes_[x].grad.block(start, 0, len, 1) += nodes_[self].grad;
                 });
}

Graph::V Graph::tanh_(V x) {
  check(x);
  return emplace(nodes_[x].value.array().tanh(), [this, x, self = next_id()] {
    const Mat& y = nodes_[self].value;
    nodes_[x].grad.array() +=
        nodes_[self].grad.array() * (1.0 - y.array().square());
  });
}

Graph::V Graph::sigmoid(V x) {
  check(x);
  Mat y = (1.0 / (1.0 + (-nodes_[x].value.array()).exp())).matrix();
  return emplace(std::move(y), [this, x, self = next_id()] {
    const Mat& y2 = nodes_[self].value;
    nodes_[x].grad.array() +=
        nodes_[self].grad.array() * y2.array() * (1.0 - y2.array());
  });
}

Graph::V Graph::exp_(V x) {
  check(x);
  return emplace(nodes_[x].value.array().exp(), [this, x, self = next_id()] {
    nodes_[x].grad.array() +=
        nodes_[self].grad.array() * nodes_[self].value.array();
  });
}

Graph::V Graph::log_floor(V x, double floor) {
  check(x);
  const Mat& X = nodes_[x].value;
  Mat y = X.array().max(floor).log();
  return emplace(std::move(y), [this, x, floor, self = next_id()] {
    const Mat& X2 = nodes_[x].value;
    const Mat& g = nodes_[self].grad;
    for (int c = 0; c < X2.cols(); ++c)
      for (int r = 0; r < X2.rows(); ++r)
        if (X2(r, c) >= floor) nodes_[x].grad(r, c) += g(r, c) / X2(r, c);
  });
}

Graph::V Graph::softmax(V x) {
  check(x);
  const Mat& X = nodes_[x].value;
  require(is_vector(X), "softmax expects a vector");
  double mx = X.maxCoeff();
  Mat e = (X.array() - mx).exp();
  Mat y = e / e.sum();
  return emplace(std::move(y), [this, x, self = next_id()] {
    const Mat& y2 = nodes_[self].value;
    const Mat& g = nodes_[self].grad;
    double gy = (g.array() * y2.array()).sum();
    nodes_[x].grad.array() += y2.array() * (g.array() - gy);
  });
}

Graph::V Graph::log_softmax(V x) {
  check(x);
  const Mat& X = nodes_[x].value;
  require(is_vector(X), "log_softmax expects a vector");
  double mx = X.maxCoeff();
  double lse = std::log((X.array() - mx).exp().sum()) + mx;
  Mat y = X.array() - lse;
  return emplace(std::move(y), [this, x, self = next_id()] {
    const Mat& y2 = nodes_[self].value;
    const Mat& g = nodes_[self].grad;
    double gsum = g.sum();
    nodes_[x].grad.array() += g.array() - y2.array().exp() * gsum;
  });
}

Graph::V Graph::pick(V x, int i) {
  check(x);
  const Mat& X = nodes_[x].value;
  require(is_vector(X) && i >= 0 && i < X.rows(), "pick index");
  Mat out(1, 1);
  out(0, 0) = X(i, 0);
  return emplace(std::move(out), [this, x, i, self = next_id()] {
    nodes_[x].grad(i, 0) += nodes_[self].grad(0, 0);
  });
}

Graph::V Graph::dot(V a, V b) {
  check(a);
  check(b);
  const Mat& A = nodes_[a].value;
  const Mat& B = nodes_[b].value;
  require(is_vector(A) && is_vector(B) && A.rows() == B.rows(), "dot dims");
  Mat out(1, 1);
  out(0, 0) = (A.array() * B.array()).sum();
  return emplace(std::move(out), [this, a, b, self = next_id()] {
    double g = nodes_[self].grad(0, 0);
    nodes_[a].grad += g * nodes_[b].value;
    nodes_[b].grad += g * nodes_[a].value;
  });
}

Graph::V Graph::sum(V x) {
  check(x);
  Mat out(1, 1);
  out(0, 0) = nodes_[x].value.sum();
  return emplace(std::move(out), [this, x, self = next_id()] {
    nodes_[x].grad.array() += nodes_[self].grad(0, 0);
  });
}

Graph::V Graph::add_n(const std::vector<V>& terms) {
  require(!terms.empty(), "add_n of nothing");
  V acc = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
  return acc;
}

void Graph::backward(V loss) {
  check(loss);
  require(nodes_[loss].value.rows() == 1 && nodes_[loss].value.cols() == 1,
          "backward expects a scalar loss");
  for (auto& n : nodes_) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  nodes_[loss].grad(0, 0) = 1.0;
  for (int i = loss; i >= 0; --i)
    if (nodes_[i].back) nodes_[i].back();
}

std::vector<Graph::V> embed_sequence(Graph& g, Tensor* table,
                                     const std::vector<int>& ids) {
  Graph::V tnode = g.param(table);
  std::vector<Graph::V> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= table->value.rows())
      throw DataError("embedding lookup out of range in table " + table->name +
                      ": " + std::to_string(id));
    out.push_back(g.row(tnode, id));
  }
  return out;
}

}  // namespace srlx::nn
