#pragma once

#include <utility>
#include <vector>

#include "srlx/decoder.hpp"
#include "srlx/nn/layers.hpp"

namespace srlx {

struct EncoderConfig {
  int embedding_dim = 100;
  int labeler_hidden = 100;  // per direction
  int labeler_layers = 2;
  int z_encoder_hidden = 100;
  int z_dim = 100;
  bool highway = true;
};

// Sentence with every argument token replaced by the MASK id. The latent
// encoder accepts only this type, so it can never see argument identity.
struct MaskedSentence {
  std::vector<int> token_ids;
  int predicate_index = -1;

  bool operator==(const MaskedSentence&) const = default;
};

// The two inference networks. The role labeler's parameters are one set,
// used for every domain; domain only enters through sentence content.
class Encoder {
 public:
  Encoder(nn::ParamStore& store, const ModelVocabs& vocabs,
          const EncoderConfig& cfg, Rng& rng);

  const EncoderConfig& config() const { return cfg_; }

  // per-argument role posteriors (softmax nodes over the inventory), in
  // instance.arguments order
  std::vector<nn::Graph::V> label_roles(nn::Graph& g,
                                        const AnnotatedSentence& sentence,
                                        const PredicateInstance& instance) const;

  MaskedSentence mask_arguments(const AnnotatedSentence& sentence,
                                const PredicateInstance& instance) const;

  // (mu, log variance), each z_dim wide
  std::pair<nn::Graph::V, nn::Graph::V> infer_latent(
      nn::Graph& g, const MaskedSentence& masked) const;

 private:
  std::vector<nn::Graph::V> encode_tokens(nn::Graph& g,
                                          const std::vector<int>& ids,
                                          int predicate_index,
                                          const nn::BiLstm& net) const;

  EncoderConfig cfg_;
  const ModelVocabs* vocabs_;
  nn::Tensor* tok_emb_ = nullptr;  // shared by labeler and latent encoder
  nn::BiLstm labeler_net_;
  nn::Tensor* role_w_ = nullptr;
  nn::Tensor* role_b_ = nullptr;
  nn::BiLstm z_net_;
  nn::Tensor* z_out_w_ = nullptr;
  nn::Tensor* z_out_b_ = nullptr;
};

}  // namespace srlx
