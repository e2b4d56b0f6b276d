#include "srlx/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "srlx/rng.hpp"

namespace srlx {

namespace {

struct LemmaLayout {
  // per role: indices into the flat argument lemma list
  std::vector<std::vector<size_t>> own;
  std::vector<std::vector<size_t>> shared;  // same list for both pair members
  std::vector<std::string> lemmas;
};

LemmaLayout build_lemmas(const SyntheticConfig& cfg) {
  LemmaLayout lay;
  lay.own.resize(cfg.roles);
  lay.shared.resize(cfg.roles);
  for (size_t r = 0; r < cfg.roles; ++r)
    for (size_t j = 0; j < cfg.lemmas_per_role; ++j) {
      lay.own[r].push_back(lay.lemmas.size());
      lay.lemmas.push_back("r" + std::to_string(r) + "_w" + std::to_string(j));
    }
  for (size_t p = 0; p + 1 < cfg.roles; p += 2) {
    std::vector<size_t> block;
    for (size_t j = 0; j < cfg.shared_lemmas_per_pair; ++j) {
      block.push_back(lay.lemmas.size());
      lay.lemmas.push_back("sh" + std::to_string(p / 2) + "_w" +
                           std::to_string(j));
    }
    lay.shared[p] = block;
    lay.shared[p + 1] = block;
  }
  return lay;
}

size_t draw_lemma(const LemmaLayout& lay, const SyntheticConfig& cfg, size_t role,
                  Rng& rng) {
  const auto& shared = lay.shared[role];
  if (!shared.empty() && rng.uniform01() < cfg.shared_mass)
    return shared[rng.below(shared.size())];
  const auto& own = lay.own[role];
  return own[rng.below(own.size())];
}

}  // namespace

double SyntheticOracle::bayes_accuracy() const {
  if (lemma_given_role.empty()) return 0.0;
  double sum = 0.0;
  for (size_t l = 0; l < argument_lemmas.size(); ++l) {
    double best = 0.0;
    for (size_t r = 0; r < lemma_given_role.size(); ++r)
      best = std::max(best, lemma_given_role[r][l]);
    sum += best;
  }
  return sum / static_cast<double>(lemma_given_role.size());
}

Corpus SyntheticOracle::reveal(const Corpus& nominal) const {
  if (nominal.sentences.size() != hidden_nominal_roles.size())
    throw DataError("oracle does not match this corpus (sentence count)");
  Corpus out = nominal;
  for (size_t si = 0; si < out.sentences.size(); ++si) {
    auto& preds = out.sentences[si].predicates;
    if (preds.size() != hidden_nominal_roles[si].size())
      throw DataError("oracle does not match this corpus (predicate count)");
    for (size_t pi = 0; pi < preds.size(); ++pi) {
      auto& args = preds[pi].arguments;
      const auto& hidden = hidden_nominal_roles[si][pi];
      if (args.size() != hidden.size())
        throw DataError("oracle does not match this corpus (slot count)");
      for (size_t ai = 0; ai < args.size(); ++ai)
        args[ai].gold_role = hidden[ai];
    }
  }
  return out;
}

SyntheticResult generate_synthetic(const SyntheticConfig& cfg, uint64_t seed) {
  if (cfg.roles == 0 || cfg.roles > RoleInventory::standard().size())
    throw ConfigError("synthetic role count out of range");
  if (cfg.min_args == 0 || cfg.min_args > cfg.max_args)
    throw ConfigError("synthetic argument count range is empty");
  if (cfg.max_args > cfg.roles)
    throw ConfigError("arguments per instance exceed the role count");
  if (cfg.min_context > cfg.max_context)
    throw ConfigError("synthetic context count range is empty");
  if (cfg.lemmas_per_role == 0) throw ConfigError("lemmas_per_role must be > 0");
  if (cfg.shared_mass < 0.0 || cfg.shared_mass > 1.0)
    throw ConfigError("shared_mass must lie in [0, 1]");
  if (cfg.predicates == 0) throw ConfigError("need at least one predicate");

  LemmaLayout lay = build_lemmas(cfg);

  SyntheticResult res;
  SyntheticOracle& oracle = res.oracle;
  oracle.roles = RoleInventory::prefix(cfg.roles);
  oracle.argument_lemmas = lay.lemmas;
  oracle.seed = seed;

  oracle.lemma_given_role.assign(
      cfg.roles, std::vector<double>(lay.lemmas.size(), 0.0));
  for (size_t r = 0; r < cfg.roles; ++r) {
    double shared_mass = lay.shared[r].empty() ? 0.0 : cfg.shared_mass;
    for (size_t l : lay.own[r])
      oracle.lemma_given_role[r][l] =
          (1.0 - shared_mass) / static_cast<double>(lay.own[r].size());
    for (size_t l : lay.shared[r])
      oracle.lemma_given_role[r][l] =
          shared_mass / static_cast<double>(lay.shared[r].size());
  }

  for (size_t p = 0; p < cfg.predicates; ++p) {
    std::string lemma = "pred" + std::to_string(p);
    oracle.predicate_lemmas_verbal.push_back(lemma);
    oracle.predicate_lemmas_nominal.push_back(lemma);
  }
  for (size_t c = 0; c < cfg.context_vocab; ++c) {
    oracle.context_vocab_verbal.push_back("vctx" + std::to_string(c));
    oracle.context_vocab_nominal.push_back("nctx" + std::to_string(c));
  }

  auto make_corpus = [&](Domain domain) {
    Corpus c;
    c.domain = domain;
    c.roles = oracle.roles;
    return c;
  };
  res.verbal = make_corpus(Domain::Verbal);
  res.nominal = make_corpus(Domain::Nominal);

  auto generate_domain = [&](Domain domain, size_t count, uint64_t tag) {
    Rng rng = Rng::derive(seed, {tag});
    Corpus& corpus = domain == Domain::Verbal ? res.verbal : res.nominal;
    const auto& ctx_vocab = domain == Domain::Verbal
                                ? oracle.context_vocab_verbal
                                : oracle.context_vocab_nominal;
    for (size_t i = 0; i < count; ++i) {
      size_t pred_id = rng.below(cfg.predicates);
      size_t m = cfg.min_args + rng.below(cfg.max_args - cfg.min_args + 1);
      std::vector<size_t> role_pool(cfg.roles);
      for (size_t r = 0; r < cfg.roles; ++r) role_pool[r] = r;
      rng.shuffle(role_pool);
      role_pool.resize(m);

      struct Slot {
        size_t role;
        size_t lemma;
        bool cue;
      };
      std::vector<Slot> slots;
      for (size_t r : role_pool) {
        bool cue = domain == Domain::Verbal && rng.uniform01() < cfg.cue_rate;
        slots.push_back({r, draw_lemma(lay, cfg, r, rng), cue});
      }

      size_t n_ctx =
          cfg.min_context + rng.below(cfg.max_context - cfg.min_context + 1);
      if (ctx_vocab.empty()) n_ctx = 0;
      std::vector<size_t> ctx;
      for (size_t k = 0; k < n_ctx; ++k)
        ctx.push_back(rng.below(ctx_vocab.size()));
      size_t n_pre = rng.below(n_ctx + 1);

      AnnotatedSentence sent;
      auto push = [&](const std::string& lemma, const std::string& pos,
                      const std::string& deprel) {
        Token t;
        t.surface = lemma;
        t.lemma = lemma;
        t.pos = pos;
        t.deprel = deprel;
        sent.tokens.push_back(std::move(t));
        return static_cast<int>(sent.tokens.size() - 1);
      };

      for (size_t k = 0; k < n_pre; ++k)
        push(ctx_vocab[ctx[k]], "XX", "CTX");
      int pred_index = push(oracle.predicate_lemmas_verbal[pred_id],
                            domain == Domain::Verbal ? "VB" : "NN", "ROOT");
      PredicateInstance inst;
      inst.token_index = pred_index;
      inst.lemma = oracle.predicate_lemmas_verbal[pred_id];
      inst.domain = domain;
      std::vector<std::string> hidden;
      for (const Slot& s : slots) {
        int ti = push(lay.lemmas[s.lemma], "NN", "ARG");
        if (s.cue) push("cue" + std::to_string(s.role), "XX", "CUE");
        ArgumentSlot slot;
        slot.token_index = ti;
        slot.lemma = lay.lemmas[s.lemma];
        if (domain == Domain::Verbal)
          slot.gold_role = oracle.roles.label(s.role);
        else
          hidden.push_back(oracle.roles.label(s.role));
        inst.arguments.push_back(std::move(slot));
      }
      for (size_t k = n_pre; k < n_ctx; ++k)
        push(ctx_vocab[ctx[k]], "XX", "CTX");

      for (int t = 0; t < static_cast<int>(sent.tokens.size()); ++t)
        if (t != pred_index) sent.tokens[t].head = pred_index;

      sent.predicates.push_back(std::move(inst));
      corpus.sentences.push_back(std::move(sent));
      if (domain == Domain::Nominal)
        oracle.hidden_nominal_roles.push_back({std::move(hidden)});
    }
  };

  generate_domain(Domain::Verbal, cfg.verbal_instances, 1);
  generate_domain(Domain::Nominal, cfg.nominal_instances, 2);

  res.verbal.rebuild_lemma_vocab();
  res.nominal.rebuild_lemma_vocab();
  return res;
}

}  // namespace srlx
