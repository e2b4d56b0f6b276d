#include "srlx/nn/layers.hpp"

namespace srlx::nn {

FeedForward make_feedforward(ParamStore& store, const std::string& prefix,
                             int in, int hidden, int out, Rng& rng) {
  if (hidden == 0) hidden = in;
  FeedForward ff;
  ff.w1 = store.create(prefix + ".w1", hidden, in);
  ff.b1 = store.create(prefix + ".b1", hidden, 1);
  ff.w2 = store.create(prefix + ".w2", out, hidden);
  ff.b2 = store.create(prefix + ".b2", out, 1);
  init_affine(*ff.w1, rng);
  init_affine(*ff.w2, rng);
  return ff;
}

Graph::V feedforward(Graph& g, const FeedForward& ff, Graph::V x) {
  Graph::V h = g.tanh_(g.affine(g.param(ff.w1), x, g.param(ff.b1)));
  return g.affine(g.param(ff.w2), h, g.param(ff.b2));
}

BiLstm make_bilstm(ParamStore& store, const std::string& prefix, int input_dim,
                   int hidden, int layers, bool highway, Rng& rng) {
  if (layers < 1) throw ConfigError("bilstm needs at least one layer");
  if (input_dim < 1 || hidden < 1)
    throw ConfigError("bilstm dimensions must be positive");
  BiLstm net;
  net.input_dim = input_dim;
  net.hidden = hidden;
  net.highway = highway;
  int in = input_dim;
  for (int l = 0; l < layers; ++l) {
    BiLstmLayer layer;
    std::string base = prefix + ".l" + std::to_string(l);
    auto make_dir = [&](const std::string& dir) {
      LstmDirection d;
      d.w = store.create(base + "." + dir + ".w", 4 * hidden, in + hidden);
      d.b = store.create(base + "." + dir + ".b", 4 * hidden, 1);
      init_affine(*d.w, rng);
      return d;
    };
    layer.fw = make_dir("fw");
    layer.bw = make_dir("bw");
    if (highway) {
      layer.highway_gate_w = store.create(base + ".hw.gate_w", 2 * hidden, in);
      layer.highway_gate_b = store.create(base + ".hw.gate_b", 2 * hidden, 1);
      layer.highway_carry_w =
          store.create(base + ".hw.carry_w", 2 * hidden, in);
      init_affine(*layer.highway_gate_w, rng);
      init_affine(*layer.highway_carry_w, rng);
    }
    net.layers.push_back(layer);
    in = 2 * hidden;
  }
  return net;
}

namespace {

// single direction over the given visit order; returns hidden per position
std::vector<Graph::V> lstm_run(Graph& g, const LstmDirection& dir, int hidden,
                               const std::vector<Graph::V>& inputs,
                               bool reverse) {
  const int n = static_cast<int>(inputs.size());
  std::vector<Graph::V> states(n);
  Graph::V w = g.param(dir.w);
  Graph::V b = g.param(dir.b);
  Graph::V h = g.input(Mat::Zero(hidden, 1));
  Graph::V c = g.input(Mat::Zero(hidden, 1));
  for (int step = 0; step < n; ++step) {
    int t = reverse ? n - 1 - step : step;
    Graph::V xh = g.concat({inputs[t], h});
    Graph::V gates = g.affine(w, xh, b);
    Graph::V i = g.sigmoid(g.slice(gates, 0, hidden));
    Graph::V f = g.sigmoid(g.slice(gates, hidden, hidden));
    Graph::V o = g.sigmoid(g.slice(gates, 2 * hidden, hidden));
    Graph::V u = g.tanh_(g.slice(gates, 3 * hidden, hidden));
    c = g.add(g.cmul(f, c), g.cmul(i, u));
    h = g.cmul(o, g.tanh_(c));
    states[t] = h;
  }
  return states;
}

}  // namespace

std::vector<Graph::V> bilstm_encode(Graph& g, const BiLstm& net,
                                    const std::vector<Graph::V>& inputs) {
  if (inputs.empty()) return {};
  std::vector<Graph::V> layer_in = inputs;
  for (const auto& layer : net.layers) {
    auto fw = lstm_run(g, layer.fw, net.hidden, layer_in, false);
    auto bw = lstm_run(g, layer.bw, net.hidden, layer_in, true);
    std::vector<Graph::V> out(layer_in.size());
    for (size_t t = 0; t < layer_in.size(); ++t) {
      Graph::V cat = g.concat({fw[t], bw[t]});
      if (net.highway) {
        Graph::V gate = g.sigmoid(g.affine(g.param(layer.highway_gate_w),
                                           layer_in[t],
                                           g.param(layer.highway_gate_b)));
        Graph::V carry = g.matvec(g.param(layer.highway_carry_w), layer_in[t]);
        Graph::V ones = g.input(Mat::Ones(2 * net.hidden, 1));
        out[t] = g.add(g.cmul(gate, cat),
                       g.cmul(g.sub(ones, gate), carry));
      } else {
        out[t] = cat;
      }
    }
    layer_in = std::move(out);
  }
  return layer_in;
}

}  // namespace srlx::nn
