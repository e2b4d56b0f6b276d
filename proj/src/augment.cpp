#include "srlx/augment.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace srlx {

Corpus pseudo_label_augment(const Model& labeler, const Corpus& pool,
                            const Corpus& targets, const AugmentConfig& cfg,
                            uint64_t seed, AugmentStats* stats) {
  std::set<std::string> wanted;
  for (const auto& sentence : targets.sentences)
    for (const auto& inst : sentence.predicates) wanted.insert(inst.lemma);

  // candidate (sentence, predicate) slots per target lemma, in corpus order
  std::map<std::string, std::vector<std::pair<size_t, size_t>>> candidates;
  for (size_t si = 0; si < pool.sentences.size(); ++si) {
    const auto& sentence = pool.sentences[si];
    if (sentence.tokens.size() > cfg.max_sentence_length) continue;
    for (size_t pi = 0; pi < sentence.predicates.size(); ++pi) {
      const auto& inst = sentence.predicates[pi];
      if (inst.arguments.empty()) continue;
      if (wanted.count(inst.lemma)) candidates[inst.lemma].push_back({si, pi});
    }
  }

  AugmentStats local;
  local.predicates = wanted.size();

  Corpus out;
  out.domain = Domain::Verbal;
  out.roles = pool.roles;
  for (const auto& lemma : wanted) {
    auto it = candidates.find(lemma);
    if (cfg.n_per_pred == 0 || it == candidates.end() ||
        it->second.empty()) {
      if (it == candidates.end() || it->second.empty()) ++local.missing;
      continue;
    }
    const auto& slots = it->second;
    Rng rng = Rng::derive(seed, {0xA06, fnv1a(lemma)});
    size_t take = std::min(cfg.n_per_pred, slots.size());
    auto chosen = rng.sample_without_replacement(slots.size(), take);
    std::sort(chosen.begin(), chosen.end());
    for (size_t c : chosen) {
      auto [si, pi] = slots[c];
      const auto& src = pool.sentences[si];
      AnnotatedSentence sentence;
      sentence.tokens = src.tokens;
      PredicateInstance inst = src.predicates[pi];
      auto roles = labeler.predict_roles(src, inst);
      for (size_t a = 0; a < inst.arguments.size(); ++a) {
        inst.arguments[a].gold_role = roles[a];
      }
      inst.domain = Domain::Verbal;
      sentence.predicates.push_back(std::move(inst));
      out.sentences.push_back(std::move(sentence));
      ++local.instances;
    }
  }
  out.rebuild_lemma_vocab();
  if (stats) *stats = local;
  return out;
}

}  // namespace srlx
