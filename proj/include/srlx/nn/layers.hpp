#pragma once

#include <string>
#include <vector>

#include "srlx/nn/graph.hpp"

namespace srlx::nn {

struct FeedForward {
  Tensor* w1 = nullptr;
  Tensor* b1 = nullptr;
  Tensor* w2 = nullptr;
  Tensor* b2 = nullptr;
};

// affine -> tanh -> affine; hidden = 0 means hidden = in
FeedForward make_feedforward(ParamStore& store, const std::string& prefix,
                             int in, int hidden, int out, Rng& rng);
Graph::V feedforward(Graph& g, const FeedForward& ff, Graph::V x);

struct LstmDirection {
  Tensor* w = nullptr;  // 4H x (in + H), gate order i, f, o, u
  Tensor* b = nullptr;  // 4H
};

struct BiLstmLayer {
  LstmDirection fw, bw;
  // highway over the layer: gate and carry projection from the layer input
  Tensor* highway_gate_w = nullptr;   // 2H x in
  Tensor* highway_gate_b = nullptr;   // 2H
  Tensor* highway_carry_w = nullptr;  // 2H x in
};

struct BiLstm {
  std::vector<BiLstmLayer> layers;
  int input_dim = 0;
  int hidden = 0;  // per direction; outputs are 2*hidden wide
  bool highway = true;
};

BiLstm make_bilstm(ParamStore& store, const std::string& prefix, int input_dim,
                   int hidden, int layers, bool highway, Rng& rng);

// one 2H vector per token; empty input gives an empty encoding
std::vector<Graph::V> bilstm_encode(Graph& g, const BiLstm& net,
                                    const std::vector<Graph::V>& inputs);

}  // namespace srlx::nn
