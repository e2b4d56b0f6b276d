#pragma once

#include <string>
#include <vector>

#include "srlx/decoder.hpp"
#include "srlx/encoder.hpp"

namespace srlx {

struct ModelConfig {
  int embedding_dim = 100;
  int z_dim = 100;
  int labeler_hidden = 100;
  int labeler_layers = 2;
  int z_encoder_hidden = 100;
  int ffn_hidden = 0;  // 0 = decoder input width
  bool highway = true;
  bool use_z = true;              // off: z pinned at 0, no latent KL
  bool use_joint_context = true;  // off: conditional-independence decoder

  DecoderConfig decoder() const {
    DecoderConfig d;
    d.embedding_dim = embedding_dim;
    d.z_dim = z_dim;
    d.ffn_hidden = ffn_hidden;
    d.joint_context = use_joint_context;
    return d;
  }
  EncoderConfig encoder() const {
    EncoderConfig e;
    e.embedding_dim = embedding_dim;
    e.labeler_hidden = labeler_hidden;
    e.labeler_layers = labeler_layers;
    e.z_encoder_hidden = z_encoder_hidden;
    e.z_dim = z_dim;
    e.highway = highway;
    return e;
  }
};

// Vocabularies, parameters, and the two networks, initialized
// deterministically from one seed.
class Model {
 public:
  Model(ModelVocabs v, const ModelConfig& c, uint64_t seed);

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& cfg() const { return cfg_; }
  const ModelVocabs& vocabs() const { return vocabs_; }
  nn::ParamStore& store() { return store_; }
  const nn::ParamStore& store() const { return store_; }
  const Decoder& decoder() const { return decoder_; }
  const Encoder& encoder() const { return encoder_; }

  // argmax role labels for the instance's arguments, in argument order
  std::vector<std::string> predict_roles(const AnnotatedSentence& sentence,
                                         const PredicateInstance& instance) const;

 private:
  ModelConfig cfg_;
  ModelVocabs vocabs_;
  nn::ParamStore store_;
  Rng init_rng_;  // consumed while the networks register parameters
  Decoder decoder_;
  Encoder encoder_;
};

}  // namespace srlx
