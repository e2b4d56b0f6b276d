#include "srlx/encoder.hpp"

namespace srlx {

using nn::Graph;
using nn::Mat;

Encoder::Encoder(nn::ParamStore& store, const ModelVocabs& vocabs,
                 const EncoderConfig& cfg, Rng& rng)
    : cfg_(cfg), vocabs_(&vocabs) {
  if (cfg.embedding_dim < 1 || cfg.z_dim < 1 || cfg.labeler_hidden < 1 ||
      cfg.z_encoder_hidden < 1 || cfg.labeler_layers < 1)
    throw ConfigError("encoder dimensions must be positive");
  tok_emb_ = store.create("enc.tok_emb",
                          static_cast<int>(vocabs.tokens.size()),
                          cfg.embedding_dim);
  init_embedding(*tok_emb_, rng);

  // +1 for the binary predicate-indicator feature
  labeler_net_ =
      nn::make_bilstm(store, "labeler.bilstm", cfg.embedding_dim + 1,
                      cfg.labeler_hidden, cfg.labeler_layers, cfg.highway, rng);
  role_w_ = store.create("labeler.role_w",
                         static_cast<int>(vocabs.roles.size()),
                         2 * cfg.labeler_hidden);
  role_b_ = store.create("labeler.role_b",
                         static_cast<int>(vocabs.roles.size()), 1);
  init_affine(*role_w_, rng);

  z_net_ = nn::make_bilstm(store, "zenc.bilstm", cfg.embedding_dim + 1,
                           cfg.z_encoder_hidden, 1, cfg.highway, rng);
  z_out_w_ = store.create("zenc.out_w", 2 * cfg.z_dim,
                          2 * cfg.z_encoder_hidden);
  z_out_b_ = store.create("zenc.out_b", 2 * cfg.z_dim, 1);
  init_affine(*z_out_w_, rng);
}

std::vector<Graph::V> Encoder::encode_tokens(Graph& g,
                                             const std::vector<int>& ids,
                                             int predicate_index,
                                             const nn::BiLstm& net) const {
  std::vector<Graph::V> inputs;
  inputs.reserve(ids.size());
  Graph::V table = g.param(tok_emb_);
  for (size_t t = 0; t < ids.size(); ++t) {
    int id = ids[t];
    if (id < 0 || id >= static_cast<int>(vocabs_->tokens.size()))
      throw DataError("token id out of range: " + std::to_string(id));
    Mat flag(1, 1);
    flag(0, 0) = static_cast<int>(t) == predicate_index ? 1.0 : 0.0;
    inputs.push_back(g.concat({g.row(table, id), g.input(flag)}));
  }
  return bilstm_encode(g, net, inputs);
}

std::vector<Graph::V> Encoder::label_roles(
    Graph& g, const AnnotatedSentence& sentence,
    const PredicateInstance& instance) const {
  std::vector<int> ids;
  ids.reserve(sentence.tokens.size());
  for (const auto& tok : sentence.tokens)
    ids.push_back(vocabs_->tokens.id_or_unk(tok.lemma));
  auto hidden = encode_tokens(g, ids, instance.token_index, labeler_net_);

  std::vector<Graph::V> posteriors;
  posteriors.reserve(instance.arguments.size());
  Graph::V w = g.param(role_w_);
  Graph::V b = g.param(role_b_);
  for (const auto& arg : instance.arguments) {
    if (arg.token_index < 0 ||
        arg.token_index >= static_cast<int>(hidden.size()))
      throw DataError("argument index outside the sentence");
    posteriors.push_back(
        g.softmax(g.affine(w, hidden[arg.token_index], b)));
  }
  return posteriors;
}

MaskedSentence Encoder::mask_arguments(const AnnotatedSentence& sentence,
                                       const PredicateInstance& instance) const {
  MaskedSentence out;
  out.predicate_index = instance.token_index;
  out.token_ids.reserve(sentence.tokens.size());
  for (const auto& tok : sentence.tokens)
    out.token_ids.push_back(vocabs_->tokens.id_or_unk(tok.lemma));
  for (const auto& arg : instance.arguments) {
    if (arg.token_index < 0 ||
        arg.token_index >= static_cast<int>(out.token_ids.size()))
      throw DataError("argument index outside the sentence");
    out.token_ids[arg.token_index] = ModelVocabs::kMaskId;
  }
  return out;
}

std::pair<Graph::V, Graph::V> Encoder::infer_latent(
    Graph& g, const MaskedSentence& masked) const {
  if (masked.token_ids.empty())
    throw DataError("latent inference over an empty sentence");
  auto hidden =
      encode_tokens(g, masked.token_ids, masked.predicate_index, z_net_);
  Graph::V pooled = g.scale(g.add_n(hidden),
                            1.0 / static_cast<double>(hidden.size()));
  Graph::V out = g.affine(g.param(z_out_w_), pooled, g.param(z_out_b_));
  Graph::V mu = g.slice(out, 0, cfg_.z_dim);
  Graph::V logvar = g.slice(out, cfg_.z_dim, cfg_.z_dim);
  return {mu, logvar};
}

}  // namespace srlx
