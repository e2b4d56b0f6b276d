#include "srlx/decoder.hpp"

#include <algorithm>
#include <numeric>

namespace srlx {

using nn::Graph;

ModelVocabs build_vocabs(const std::vector<const Corpus*>& corpora,
                         const RoleInventory& roles) {
  ModelVocabs v;
  v.roles = roles;
  for (const Corpus* c : corpora) {
    for (const auto& sent : c->sentences) {
      for (const auto& tok : sent.tokens) v.tokens.add(tok.lemma);
      for (const auto& pred : sent.predicates) {
        v.predicates.add(pred.lemma);
        for (const auto& arg : pred.arguments) v.arg_lemmas.add(arg.lemma);
      }
    }
  }
  return v;
}

Decoder::Decoder(nn::ParamStore& store, const ModelVocabs& vocabs,
                 const DecoderConfig& cfg, Rng& rng)
    : cfg_(cfg), vocabs_(&vocabs) {
  if (cfg.embedding_dim < 1 || cfg.z_dim < 1)
    throw ConfigError("decoder dimensions must be positive");
  const int d = cfg.embedding_dim;
  pred_emb_ = store.create("dec.pred_emb",
                           static_cast<int>(vocabs.predicates.size()), d);
  role_emb_ =
      store.create("dec.role_emb", static_cast<int>(vocabs.roles.size()), d);
  arg_emb_ = store.create("dec.arg_emb",
                          static_cast<int>(vocabs.arg_lemmas.size()), d);
  init_embedding(*pred_emb_, rng);
  init_embedding(*role_emb_, rng);
  init_embedding(*arg_emb_, rng);

  int in = d + cfg.z_dim + d;           // predicate, z, role
  if (cfg.joint_context) in += 2 * d;   // c_a, c_y
  ffn_ = nn::make_feedforward(store, "dec.ffn", in, cfg.ffn_hidden,
                              static_cast<int>(vocabs.arg_lemmas.size()), rng);
}

Graph::V Decoder::role_embedding(Graph& g, const RoleVector& role) const {
  if ((role.hard >= 0) == (role.relaxed >= 0))
    throw DataError("role vector must be exactly one of hard or relaxed");
  if (role.hard >= 0) {
    if (role.hard >= static_cast<int>(vocabs_->roles.size()))
      throw DataError("role id out of range");
    return g.row(g.param(role_emb_), role.hard);
  }
  if (g.value(role.relaxed).rows() !=
      static_cast<int>(vocabs_->roles.size()))
    throw DataError("relaxed role weights have wrong dimension");
  return g.tmatvec(g.param(role_emb_), role.relaxed);
}

std::pair<Graph::V, Graph::V> Decoder::context_vectors(
    Graph& g, const std::vector<Graph::V>& arg_embeddings,
    const std::vector<Graph::V>& role_embeddings, size_t exclude) const {
  if (arg_embeddings.size() != role_embeddings.size())
    throw DataError("context lists must have equal length");
  const size_t m = arg_embeddings.size();
  if (m == 0 || exclude >= m) throw DataError("bad context exclude index");
  if (m == 1) {
    Graph::V zero = g.input(nn::Mat::Zero(cfg_.embedding_dim, 1));
    return {zero, zero};
  }
  std::vector<Graph::V> a_terms, y_terms;
  for (size_t j = 0; j < m; ++j) {
    if (j == exclude) continue;
    a_terms.push_back(arg_embeddings[j]);
    y_terms.push_back(role_embeddings[j]);
  }
  double inv = 1.0 / static_cast<double>(m - 1);
  return {g.scale(g.add_n(a_terms), inv), g.scale(g.add_n(y_terms), inv)};
}

Graph::V Decoder::argument_logits(Graph& g, Graph::V pred_embedding,
                                  Graph::V z, Graph::V role_embedding,
                                  Graph::V c_a, Graph::V c_y) const {
  std::vector<Graph::V> parts{pred_embedding, z, role_embedding};
  if (cfg_.joint_context) {
    if (c_a < 0 || c_y < 0)
      throw DataError("joint-context decoder needs both context vectors");
    parts.push_back(c_a);
    parts.push_back(c_y);
  }
  return g.log_softmax(nn::feedforward(g, ffn_, g.concat(parts)));
}

Graph::V Decoder::pseudolikelihood(Graph& g, const PredicateInstance& instance,
                                   const std::vector<RoleVector>& roles,
                                   Graph::V z) const {
  const size_t m = instance.arguments.size();
  if (m == 0) throw DataError("pseudolikelihood over zero arguments");
  if (roles.size() != m)
    throw DataError("role vector count does not match argument count");

  // canonical order: sorted by token index, stable under list permutation
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return instance.arguments[a].token_index < instance.arguments[b].token_index;
  });

  Graph::V pred = g.row(g.param(pred_emb_),
                        vocabs_->predicates.id(instance.lemma));
  std::vector<Graph::V> arg_embs(m), role_embs(m);
  std::vector<int> targets(m);
  for (size_t k = 0; k < m; ++k) {
    const ArgumentSlot& slot = instance.arguments[order[k]];
    int lemma_id = vocabs_->arg_lemmas.id(slot.lemma);
    targets[k] = lemma_id;
    arg_embs[k] = g.row(g.param(arg_emb_), lemma_id);
    role_embs[k] = role_embedding(g, roles[order[k]]);
  }

  std::vector<Graph::V> terms;
  terms.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    Graph::V c_a = -1, c_y = -1;
    if (cfg_.joint_context) {
      if (cfg_.autoregressive) {
        // condition on the canonical prefix instead of all-but-i
        if (i == 0) {
          Graph::V zero = g.input(nn::Mat::Zero(cfg_.embedding_dim, 1));
          c_a = c_y = zero;
        } else {
          std::vector<Graph::V> a_prefix(arg_embs.begin(),
                                         arg_embs.begin() + i);
          std::vector<Graph::V> y_prefix(role_embs.begin(),
                                         role_embs.begin() + i);
          double inv = 1.0 / static_cast<double>(i);
          c_a = g.scale(g.add_n(a_prefix), inv);
          c_y = g.scale(g.add_n(y_prefix), inv);
        }
      } else {
        auto [ca, cy] = context_vectors(g, arg_embs, role_embs, i);
        c_a = ca;
        c_y = cy;
      }
    }
    Graph::V logits = argument_logits(g, pred, z, role_embs[i], c_a, c_y);
    terms.push_back(g.pick(logits, targets[i]));
  }
  return g.add_n(terms);
}

}  // namespace srlx
