#include "srlx/identify.hpp"

#include "doctest.h"

using namespace srlx;

namespace {

Token tok(const std::string& lemma, const std::string& pos,
          std::optional<int> head, const std::string& deprel) {
  return Token{lemma, lemma, pos, head, deprel};
}

}  // namespace

TEST_CASE("isolated predicate yields no arguments") {
  AnnotatedSentence s;
  s.tokens = {tok("ran", "VBD", std::nullopt, "ROOT"),
              tok("growth", "NN", 0, "NMOD"),
              tok("fast", "RB", 0, "ADV")};
  // growth: no dependents, sibling is a non-preposition, not an OBJ, no
  // preceding SBJ word
  CHECK(identify_arguments(s, 1).empty());
}

TEST_CASE("preceding dependent and following preposition dependent") {
  AnnotatedSentence s;
  s.tokens = {tok("company", "NN", 1, "NMOD"),
              tok("acquisition", "NN", std::nullopt, "ROOT"),
              tok("of", "IN", 1, "NMOD"),
              tok("rival", "NN", 2, "PMOD"),
              tok("today", "NN", 1, "TMP"),
              tok(".", ".", 1, "P")};
  auto args = identify_arguments(s, 1);
  CHECK(args == std::set<int>{0, 2});
}

TEST_CASE("following non-preposition dependent is not an argument") {
  AnnotatedSentence s;
  s.tokens = {tok("meeting", "NN", std::nullopt, "ROOT"),
              tok("yesterday", "NN", 0, "TMP")};
  CHECK(identify_arguments(s, 0).empty());
}

TEST_CASE("determiners and punctuation never become arguments") {
  AnnotatedSentence s;
  s.tokens = {tok("the", "DT", 1, "NMOD"),
              tok("sale", "NN", std::nullopt, "ROOT"),
              tok(",", ",", 1, "P")};
  CHECK(identify_arguments(s, 1).empty());
}

TEST_CASE("SBJ sibling of an OBJ predicate is an argument") {
  AnnotatedSentence s;
  s.tokens = {tok("analysts", "NNS", 1, "SBJ"),
              tok("made", "VBD", std::nullopt, "ROOT"),
              tok("announcement", "NN", 1, "OBJ")};
  auto args = identify_arguments(s, 2);
  CHECK(args == std::set<int>{0});
}

TEST_CASE("SBJ sibling is skipped when the predicate is not an OBJ") {
  AnnotatedSentence s;
  // pred carries a preceding dependent so the closest-SBJ rule stays out
  s.tokens = {tok("investors", "NNS", 2, "SBJ"),
              tok("strong", "JJ", 3, "NMOD"),
              tok("saw", "VBD", std::nullopt, "ROOT"),
              tok("growth", "NN", 2, "ADV")};
  auto args = identify_arguments(s, 3);
  CHECK(args == std::set<int>{1});  // the preceding dependent only
}

TEST_CASE("closest preceding SBJ fires only without preceding dependents") {
  AnnotatedSentence s;
  s.tokens = {tok("investors", "NNS", 1, "SBJ"),
              tok("welcomed", "VBD", std::nullopt, "ROOT"),
              tok("growth", "NN", 1, "ADV")};
  CHECK(identify_arguments(s, 2) == std::set<int>{0});

  AnnotatedSentence t;
  t.tokens = {tok("investors", "NNS", 1, "SBJ"),
              tok("welcomed", "VBD", std::nullopt, "ROOT"),
              tok("strong", "JJ", 3, "NMOD"),
              tok("growth", "NN", 1, "ADV")};
  // growth now has a preceding dependent, which wins instead
  CHECK(identify_arguments(t, 3) == std::set<int>{2});
}

TEST_CASE("preposition sibling rule honours both gate readings") {
  AnnotatedSentence s;
  s.tokens = {tok("meeting", "NN", 1, "SBJ"),
              tok("happened", "VBD", std::nullopt, "ROOT"),
              tok("in", "IN", 1, "LOC")};
  // no dependents: default reading admits the prep sibling
  CHECK(identify_arguments(s, 0) == std::set<int>{2});
  IdentifyConfig literal;
  literal.prep_siblings_require_no_dependents = false;
  CHECK(identify_arguments(s, 0, literal).empty());

  AnnotatedSentence t;
  t.tokens = {tok("the", "DT", 1, "NMOD"),
              tok("meeting", "NN", 2, "SBJ"),
              tok("happened", "VBD", std::nullopt, "ROOT"),
              tok("in", "IN", 2, "LOC")};
  // with a dependent present the readings swap
  CHECK(identify_arguments(t, 1).empty());
  CHECK(identify_arguments(t, 1, literal) == std::set<int>{3});
}

TEST_CASE("identification ignores surface forms") {
  AnnotatedSentence s;
  s.tokens = {tok("company", "NN", 1, "NMOD"),
              tok("acquisition", "NN", std::nullopt, "ROOT"),
              tok("of", "IN", 1, "NMOD")};
  auto before = identify_arguments(s, 1);
  for (auto& t : s.tokens) t.surface = "x" + t.surface;
  CHECK(identify_arguments(s, 1) == before);
}

TEST_CASE("out of range predicate index raises") {
  AnnotatedSentence s;
  s.tokens = {tok("a", "NN", std::nullopt, "ROOT")};
  CHECK_THROWS_AS(identify_arguments(s, 3), DataError);
  CHECK_THROWS_AS(identify_arguments(s, -1), DataError);
}

TEST_CASE("predicate lexicon lookup is exact on the pair") {
  PredicateLexicon lex{{"acquire", "VBD"}};
  AnnotatedSentence s;
  s.tokens = {tok("acquire", "VBD", std::nullopt, "ROOT"),
              tok("acquire", "NN", 0, "OBJ"),
              tok("sell", "VBD", 0, "CONJ")};
  auto preds = identify_predicates(s, lex);
  CHECK(preds == std::vector<int>{0});
  CHECK(identify_predicates(s, {}).empty());
}

TEST_CASE("lexicon built from a corpus uses token lemma and POS") {
  Corpus c;
  c.domain = Domain::Verbal;
  AnnotatedSentence s;
  s.tokens = {tok("acquired", "VBD", std::nullopt, "ROOT")};
  s.tokens[0].lemma = "acquire";
  PredicateInstance inst;
  inst.token_index = 0;
  inst.lemma = "acquire";
  inst.domain = Domain::Verbal;
  inst.arguments = {};
  s.predicates.push_back(inst);
  c.sentences.push_back(s);
  auto lex = build_predicate_lexicon(c);
  CHECK(lex.count({"acquire", "VBD"}) == 1);
}
