#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "srlx/evaluation.hpp"
#include "srlx/nn/params.hpp"
#include "srlx/rng.hpp"

namespace srlx {

// role lookup keyed by (predicate, argument lemma), backing off to the
// predicate alone and finally to the corpus-wide modal role; ties resolve
// toward the earlier role in the inventory
class MostFrequent {
 public:
  void fit(const Corpus& verbal);

  struct Prediction {
    std::string role;
    bool unseen_predicate = false;
  };
  Prediction predict(const std::string& predicate,
                     const std::string& argument) const;

  // unseen counts arguments routed through the global fallback
  std::vector<PredictionRecord> label(const Corpus& corpus,
                                      size_t* unseen = nullptr) const;

 private:
  const std::vector<int64_t>* pair_counts(const std::string& predicate,
                                          const std::string& argument) const;

  RoleInventory roles_;
  std::map<std::pair<std::string, std::string>, std::vector<int64_t>> by_pair_;
  std::map<std::string, std::vector<int64_t>> by_pred_;
  std::vector<int64_t> global_;
  bool fitted_ = false;
};

struct FactorizationConfig {
  int dim = 100;
  size_t epochs = 15;
  size_t batch = 64;
  double lr = 1.0;
  double rho = 0.95;
  double eps = 1e-6;
  double clip_norm = 5.0;
};

// bilinear role-compatibility scorer: s(a, y, p) = v_a' W_y v_p + v_a' w_y,
// fit by maximizing log p(a | p, y) with a full softmax over the argument
// vocabulary, applied as argmax_y s
class Factorization {
 public:
  Factorization(const Corpus& verbal, const FactorizationConfig& cfg,
                uint64_t seed);

  // per-epoch mean negative log-likelihood, in epoch order
  std::vector<double> fit(const Corpus& verbal);

  double score(const std::string& predicate, const std::string& argument,
               size_t role_id) const;
  std::string predict(const std::string& predicate,
                      const std::string& argument) const;
  std::vector<PredictionRecord> label(const Corpus& corpus) const;

  // one triple's negative log-likelihood; gradients accumulate when asked
  double triple_loss(int pred_id, int arg_id, size_t role_id, bool backward);

  nn::ParamStore& store() { return store_; }
  const Vocab& argument_vocab() const { return args_; }
  const Vocab& predicate_vocab() const { return preds_; }
  const RoleInventory& roles() const { return roles_; }

 private:
  Eigen::VectorXd role_transform(int pred_id, size_t role_id) const;

  FactorizationConfig cfg_;
  RoleInventory roles_;
  Vocab args_, preds_;
  nn::ParamStore store_;
  nn::Tensor* arg_emb_ = nullptr;
  nn::Tensor* pred_emb_ = nullptr;
  std::vector<nn::Tensor*> role_w_;
  std::vector<nn::Tensor*> role_b_;
  uint64_t seed_ = 0;
};

// every argument in one cluster named A0
std::vector<PredictionRecord> all_a0_labels(const Corpus& corpus);

// one cluster per dependency relation of the argument token
std::vector<PredictionRecord> syntactic_function_labels(const Corpus& corpus);

using EmbeddingTable = std::map<std::string, Eigen::VectorXd>;

// text format: lemma followed by the vector components, one entry per line;
// an optional word2vec-style "count dim" header line is skipped
EmbeddingTable load_embeddings(const std::string& path);

struct Arg2vecResult {
  std::vector<PredictionRecord> records;
  std::map<std::string, std::string> lemma_cluster;
  size_t missing = 0;  // lemmas without embeddings, parked in oov singletons
};

// average-linkage agglomerative clustering of argument-lemma embeddings
// under cosine distance, cut at k clusters; arguments inherit their lemma's
// cluster
Arg2vecResult arg2vec_labels(const Corpus& corpus,
                             const EmbeddingTable& embeddings, size_t k = 15);

}  // namespace srlx
