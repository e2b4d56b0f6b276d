#pragma once

#include <utility>
#include <vector>

#include "srlx/corpus.hpp"
#include "srlx/nn/layers.hpp"

namespace srlx {

// Shared vocabularies the encoder and decoder are built over. Argument and
// predicate lemmas are pooled across domains; that pooling is what lets
// selectional preferences learned on one domain score the other.
struct ModelVocabs {
  Vocab tokens{std::vector<std::string>{"<unk>", "<mask>"}};
  Vocab arg_lemmas;
  Vocab predicates;
  RoleInventory roles = RoleInventory::standard();

  static constexpr int kMaskId = 1;
};

ModelVocabs build_vocabs(const std::vector<const Corpus*>& corpora,
                         const RoleInventory& roles);

struct DecoderConfig {
  int embedding_dim = 100;
  int z_dim = 100;
  int ffn_hidden = 0;        // 0 = input width
  bool joint_context = true; // off = conditional-independence ablation
  bool autoregressive = false;
};

// Role input to the decoder: a hard inventory id or a node holding relaxed
// simplex weights over roles, exactly one of the two.
struct RoleVector {
  nn::Graph::V relaxed = -1;
  int hard = -1;

  static RoleVector gold(int role_id) { return RoleVector{-1, role_id}; }
  static RoleVector soft(nn::Graph::V weights) { return RoleVector{weights, -1}; }
};

// Selectional-preference generator: predicts each argument lemma from the
// predicate, the latent code, the slot's role, and the mean-pooled other
// roles and arguments. All per-slot iteration happens in canonical order
// (slots sorted by token index), which makes the summed log likelihood
// bitwise invariant to permutations of the argument list.
class Decoder {
 public:
  Decoder(nn::ParamStore& store, const ModelVocabs& vocabs,
          const DecoderConfig& cfg, Rng& rng);

  const DecoderConfig& config() const { return cfg_; }

  nn::Graph::V role_embedding(nn::Graph& g, const RoleVector& role) const;

  // mean over positions j != exclude; zero vectors when m == 1
  std::pair<nn::Graph::V, nn::Graph::V> context_vectors(
      nn::Graph& g, const std::vector<nn::Graph::V>& arg_embeddings,
      const std::vector<nn::Graph::V>& role_embeddings, size_t exclude) const;

  // log-probabilities over the argument lemma vocabulary; pass c_a = c_y = -1
  // under the no-joint-context configuration
  nn::Graph::V argument_logits(nn::Graph& g, nn::Graph::V pred_embedding,
                               nn::Graph::V z, nn::Graph::V role_embedding,
                               nn::Graph::V c_a, nn::Graph::V c_y) const;

  // sum_i log p(a_i | y, a_{-i}, z, p); roles run parallel to
  // instance.arguments
  nn::Graph::V pseudolikelihood(nn::Graph& g, const PredicateInstance& instance,
                                const std::vector<RoleVector>& roles,
                                nn::Graph::V z) const;

  nn::Tensor* predicate_table() const { return pred_emb_; }
  nn::Tensor* role_table() const { return role_emb_; }
  nn::Tensor* argument_table() const { return arg_emb_; }

 private:
  DecoderConfig cfg_;
  const ModelVocabs* vocabs_;
  nn::Tensor* pred_emb_ = nullptr;
  nn::Tensor* role_emb_ = nullptr;
  nn::Tensor* arg_emb_ = nullptr;
  nn::FeedForward ffn_;
};

}  // namespace srlx
