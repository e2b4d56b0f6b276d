#include "srlx/identify.hpp"

#include <algorithm>

namespace srlx {

namespace {

bool pos_in(const std::string& pos, const std::vector<std::string>& set) {
  return std::find(set.begin(), set.end(), pos) != set.end();
}

}  // namespace

std::set<int> identify_arguments(const AnnotatedSentence& sentence,
                                 int pred_index, const IdentifyConfig& cfg) {
  const int n = static_cast<int>(sentence.tokens.size());
  if (pred_index < 0 || pred_index >= n)
    throw DataError("predicate index out of range: " +
                    std::to_string(pred_index));
  const Token& pred = sentence.tokens[pred_index];

  // rule 1: determiners and punctuation are out of consideration entirely
  auto eligible = [&](int i) {
    const std::string& pos = sentence.tokens[i].pos;
    return i != pred_index && !pos_in(pos, cfg.determiner_pos) &&
           !pos_in(pos, cfg.punctuation_pos);
  };

  std::vector<int> dependents, siblings;
  for (int i = 0; i < n; ++i) {
    if (i == pred_index) continue;
    const auto& h = sentence.tokens[i].head;
    if (h.has_value() && *h == pred_index) dependents.push_back(i);
    if (pred.head.has_value() && h.has_value() && *h == *pred.head)
      siblings.push_back(i);
  }

  std::set<int> args;

  // rule 2: preceding dependents; following ones only when prepositional
  for (int d : dependents) {
    if (!eligible(d)) continue;
    if (d < pred_index || pos_in(sentence.tokens[d].pos, cfg.prep_pos))
      args.insert(d);
  }

  // rule 3: preposition siblings, gated on the predicate's dependents
  bool rule3_gate = cfg.prep_siblings_require_no_dependents
                        ? dependents.empty()
                        : !dependents.empty();
  if (rule3_gate) {
    for (int s : siblings)
      if (eligible(s) && pos_in(sentence.tokens[s].pos, cfg.prep_pos))
        args.insert(s);
  }

  // rule 4: SBJ siblings when the predicate itself is an OBJ
  if (pred.deprel == cfg.obj_deprel) {
    for (int s : siblings)
      if (eligible(s) && sentence.tokens[s].deprel == cfg.subj_deprel)
        args.insert(s);
  }

  // rule 5: closest preceding SBJ word when nothing precedes among dependents
  bool has_preceding_dependent =
      std::any_of(dependents.begin(), dependents.end(),
                  [&](int d) { return d < pred_index; });
  if (!has_preceding_dependent) {
    for (int i = pred_index - 1; i >= 0; --i) {
      if (sentence.tokens[i].deprel != cfg.subj_deprel) continue;
      if (eligible(i)) args.insert(i);
      break;
    }
  }

  return args;
}

PredicateLexicon build_predicate_lexicon(const Corpus& corpus) {
  PredicateLexicon lex;
  for (const auto& sent : corpus.sentences)
    for (const auto& pred : sent.predicates) {
      const Token& tok = sent.tokens.at(pred.token_index);
      lex.emplace(tok.lemma, tok.pos);
    }
  return lex;
}

std::vector<int> identify_predicates(const AnnotatedSentence& sentence,
                                     const PredicateLexicon& lexicon) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(sentence.tokens.size()); ++i)
    if (lexicon.count({sentence.tokens[i].lemma, sentence.tokens[i].pos}))
      out.push_back(i);
  return out;
}

}  // namespace srlx
