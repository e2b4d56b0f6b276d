#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "srlx/corpus.hpp"

namespace srlx {

struct IdentifyConfig {
  std::vector<std::string> determiner_pos = {"DT"};
  std::vector<std::string> punctuation_pos = {".", ",", ":",  "``",
                                              "''", "-LRB-", "-RRB-"};
  std::vector<std::string> prep_pos = {"IN"};
  std::string subj_deprel = "SBJ";
  std::string obj_deprel = "OBJ";
  // The source formulation of the preposition-sibling rule reads "does have
  // any dependents" where the surrounding rules suggest the negation. Default
  // follows the negated reading; flip for the literal one.
  bool prep_siblings_require_no_dependents = true;
};

// Rule-based argument identification over the dependency tree and POS tags.
// Starting from all-non-argument: determiners and punctuation are never
// arguments; preceding dependents of the predicate are arguments, following
// dependents only when prepositional; preposition siblings qualify subject to
// the dependent condition above; SBJ siblings qualify when the predicate's
// own relation is OBJ; the closest preceding SBJ word qualifies when the
// predicate has no preceding dependents.
std::set<int> identify_arguments(const AnnotatedSentence& sentence,
                                 int pred_index,
                                 const IdentifyConfig& cfg = {});

using PredicateLexicon = std::set<std::pair<std::string, std::string>>;

// every (lemma, POS) occurrence of a training predicate
PredicateLexicon build_predicate_lexicon(const Corpus& corpus);

std::vector<int> identify_predicates(const AnnotatedSentence& sentence,
                                     const PredicateLexicon& lexicon);

}  // namespace srlx
