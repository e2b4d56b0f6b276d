#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "srlx/baselines.hpp"
#include "srlx/nn/gradcheck.hpp"
#include "srlx/synthetic.hpp"

using namespace srlx;

namespace {

Token arg_token(const std::string& lemma, const std::string& deprel) {
  return Token{lemma, lemma, "NN", 0, deprel};
}

// single-predicate sentence; role empty string means no gold, a leading
// '@' in the lemma sets the deprel to the text after it
AnnotatedSentence inst(
    const std::string& pred,
    const std::vector<std::pair<std::string, std::string>>& args) {
  AnnotatedSentence s;
  s.tokens.push_back(Token{pred, pred, "VB", std::nullopt, "ROOT"});
  PredicateInstance p;
  p.token_index = 0;
  p.lemma = pred;
  for (const auto& [lemma, role] : args) {
    ArgumentSlot a;
    a.token_index = static_cast<int>(s.tokens.size());
    a.lemma = lemma;
    if (!role.empty()) a.gold_role = role;
    s.tokens.push_back(arg_token(lemma, role.empty() ? "DEP" : role));
    p.arguments.push_back(a);
  }
  s.predicates.push_back(p);
  return s;
}

Corpus corpus_of(std::vector<AnnotatedSentence> ss) {
  Corpus c;
  c.sentences = std::move(ss);
  c.rebuild_lemma_vocab();
  return c;
}

}  // namespace

TEST_CASE("most-frequent follows counts with documented fallbacks") {
  Corpus c = corpus_of({
      inst("eat", {{"apple", "A1"}}),
      inst("eat", {{"apple", "A1"}}),
      inst("eat", {{"apple", "A1"}}),
      inst("eat", {{"apple", "A0"}}),
      inst("eat", {{"fork", "AM-MNR"}}),
      inst("feed", {{"bone", "A0"}}),
      inst("feed", {{"bone", "A1"}}),
  });
  MostFrequent mf;
  mf.fit(c);

  // plain majority on the pair
  CHECK(mf.predict("eat", "apple").role == "A1");
  CHECK_FALSE(mf.predict("eat", "apple").unseen_predicate);

  // pair tie resolves toward the earlier inventory role
  CHECK(mf.predict("feed", "bone").role == "A0");

  // unseen argument backs off to the predicate's modal role
  CHECK(mf.predict("eat", "rock").role == "A1");
  CHECK_FALSE(mf.predict("eat", "rock").unseen_predicate);

  // unseen predicate backs off to the corpus modal role, flagged
  auto p = mf.predict("devour", "apple");
  CHECK(p.role == "A1");
  CHECK(p.unseen_predicate);

  // count-based, so order can't matter
  Corpus reversed = c;
  std::reverse(reversed.sentences.begin(), reversed.sentences.end());
  MostFrequent mf2;
  mf2.fit(reversed);
  for (const auto& [pred, arg] :
       std::vector<std::pair<std::string, std::string>>{
           {"eat", "apple"}, {"eat", "rock"}, {"feed", "bone"},
           {"devour", "x"}}) {
    CHECK(mf.predict(pred, arg).role == mf2.predict(pred, arg).role);
  }
}

TEST_CASE("most-frequent single observation generalizes to its pair") {
  Corpus c = corpus_of({inst("buy", {{"share", "A1"}})});
  MostFrequent mf;
  mf.fit(c);
  CHECK(mf.predict("buy", "share").role == "A1");
  CHECK(mf.predict("buy", "anything").role == "A1");

  size_t unseen = 0;
  auto records = mf.label(c, &unseen);
  REQUIRE(records.size() == 1);
  CHECK(records[0].predicted == std::vector<std::string>{"A1"});
  CHECK(unseen == 0);
}

TEST_CASE("most-frequent rejects bad usage") {
  MostFrequent mf;
  CHECK_THROWS_AS(mf.predict("a", "b"), ConfigError);
  Corpus no_gold = corpus_of({inst("eat", {{"apple", ""}})});
  CHECK_THROWS_AS(mf.fit(no_gold), DataError);
}

TEST_CASE("factorization gradient matches finite differences") {
  Corpus c = corpus_of({
      inst("eat", {{"apple", "A1"}, {"cook", "A0"}}),
      inst("buy", {{"share", "A1"}, {"firm", "A0"}, {"today", "AM-TMP"}}),
  });
  FactorizationConfig fc;
  fc.dim = 5;
  Factorization f(c, fc, 11);
  auto loss = [&](bool backward) {
    double total = 0.0;
    total += f.triple_loss(f.predicate_vocab().id("eat"),
                           f.argument_vocab().id("apple"),
                           f.roles().id("A1"), backward);
    total += f.triple_loss(f.predicate_vocab().id("buy"),
                           f.argument_vocab().id("firm"),
                           f.roles().id("A0"), backward);
    return total;
  };
  auto r = nn::grad_check(f.store(), loss, 1e-5, 200, 3);
  CHECK(r.max_rel_err < 1e-4);
}

TEST_CASE("factorization score is linear in the argument embedding") {
  Corpus c = corpus_of({
      inst("eat", {{"apple", "A1"}, {"cook", "A0"}, {"fork", "AM-MNR"}}),
  });
  FactorizationConfig fc;
  fc.dim = 6;
  Factorization f(c, fc, 5);
  auto& emb = *f.store().get("fac.arg_emb");
  int i = f.argument_vocab().id("apple");
  int j = f.argument_vocab().id("cook");
  int k = f.argument_vocab().id("fork");
  emb.value.row(i) = 2.0 * emb.value.row(j) + 3.0 * emb.value.row(k);
  for (size_t y = 0; y < f.roles().size(); ++y) {
    CHECK(f.score("eat", "apple", y) ==
          doctest::Approx(2.0 * f.score("eat", "cook", y) +
                          3.0 * f.score("eat", "fork", y))
              .epsilon(1e-9));
  }
}

TEST_CASE("factorization with zero interaction ignores the predicate") {
  Corpus c = corpus_of({
      inst("eat", {{"apple", "A1"}}),
      inst("buy", {{"share", "A1"}}),
  });
  FactorizationConfig fc;
  fc.dim = 4;
  Factorization f(c, fc, 9);
  for (const auto& label : f.roles().labels()) {
    f.store().get("fac.W." + label)->value.setZero();
  }
  // make the offset vectors separate roles on their own
  Rng rng = Rng::derive(21, {0});
  for (const auto& label : f.roles().labels()) {
    auto& w = f.store().get("fac.w." + label)->value;
    for (int r = 0; r < w.rows(); ++r) w(r, 0) = rng.normal();
  }
  for (const auto& arg : {"apple", "share", "mystery"}) {
    CHECK(f.predict("eat", arg) == f.predict("buy", arg));
    CHECK(f.predict("eat", arg) == f.predict("never-seen-predicate", arg));
  }
}

TEST_CASE("factorization recovers a one-lemma-per-role construction") {
  SyntheticConfig sc;
  sc.roles = 4;
  sc.lemmas_per_role = 1;
  sc.shared_lemmas_per_pair = 0;
  sc.predicates = 2;
  sc.context_vocab = 6;
  sc.verbal_instances = 60;
  sc.nominal_instances = 5;
  auto gen = generate_synthetic(sc, 17);

  FactorizationConfig fc;
  fc.dim = 12;
  fc.epochs = 30;
  fc.batch = 16;
  Factorization f(gen.verbal, fc, 17);
  auto nll = f.fit(gen.verbal);
  REQUIRE(nll.size() == fc.epochs);
  CHECK(nll.back() < nll.front());

  auto records = f.label(gen.verbal);
  auto scores = supervised_scores(records);
  CHECK(scores.accuracy == 1.0);

  // predictions never leave the inventory
  for (const auto& r : records) {
    for (const auto& role : r.predicted) {
      CHECK(gen.verbal.roles.contains(role));
    }
  }
}

TEST_CASE("factorization unseen lemmas route through the unk row") {
  Corpus c = corpus_of({inst("eat", {{"apple", "A1"}})});
  FactorizationConfig fc;
  fc.dim = 4;
  Factorization f(c, fc, 2);
  for (size_t y = 0; y < f.roles().size(); ++y) {
    CHECK(f.score("eat", "qwerty", y) == f.score("eat", "<unk>", y));
  }
  CHECK(f.predict("eat", "qwerty") == f.predict("eat", "zxcvb"));
}

TEST_CASE("all-a0 scores the single-cluster anchors") {
  Corpus c = corpus_of({
      inst("eat", {{"cook", "A0"}, {"apple", "A1"}, {"fork", "A1"}}),
      inst("eat", {{"cook", "A0"}, {"apple", "A1"}}),
  });
  auto records = all_a0_labels(c);
  for (const auto& r : records) {
    for (const auto& p : r.predicted) CHECK(p == "A0");
  }
  auto s = clustering_from_records(records);
  CHECK(s.collocation == 1.0);
  CHECK(s.purity == doctest::Approx(3.0 / 5.0).epsilon(1e-12));

  auto sup = supervised_scores(records);
  CHECK(sup.accuracy == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("syntactic-function clusters mirror deprels") {
  // gold role written into the deprel by the fixture, so PU = CO = 1
  Corpus c = corpus_of({
      inst("eat", {{"cook", "A0"}, {"apple", "A1"}}),
      inst("buy", {{"firm", "A0"}, {"share", "A1"}, {"today", "AM-TMP"}}),
  });
  auto records = syntactic_function_labels(c);
  CHECK(records[0].predicted ==
        std::vector<std::string>{"A0", "A1"});
  auto s = clustering_from_records(records);
  CHECK(s.purity == 1.0);
  CHECK(s.collocation == 1.0);
  CHECK(s.f1 == 1.0);
}

TEST_CASE("embedding files parse with optional header") {
  namespace fs = std::filesystem;
  auto path = (fs::temp_directory_path() / "srlx_emb.txt").string();
  {
    std::ofstream out(path);
    out << "3 2\n";
    out << "cat 0.25 -1.5\n";
    out << "dog 1 2\n";
    out << "fish 0 1\n";
  }
  auto table = load_embeddings(path);
  REQUIRE(table.size() == 3);
  CHECK(table.at("cat")(0) == 0.25);
  CHECK(table.at("cat")(1) == -1.5);
  CHECK(table.at("dog").size() == 2);
  fs::remove(path);

  {
    std::ofstream out(path);
    out << "cat 0.25 -1.5\n";
    out << "dog 1\n";
  }
  CHECK_THROWS_AS(load_embeddings(path), ParseError);
  fs::remove(path);

  CHECK_THROWS_AS(load_embeddings("/nonexistent/emb.txt"), ConfigError);
}

TEST_CASE("arg2vec groups lemmas by embedding direction") {
  Corpus c = corpus_of({
      inst("eat", {{"cook", "A0"}, {"chef", "A0"}}),
      inst("eat", {{"apple", "A1"}, {"pear", "A1"}}),
  });
  EmbeddingTable emb;
  emb["cook"] = Eigen::Vector2d(1.0, 0.0);
  emb["chef"] = Eigen::Vector2d(0.98, 0.2);
  emb["apple"] = Eigen::Vector2d(0.0, 1.0);
  emb["pear"] = Eigen::Vector2d(-0.1, 0.99);

  auto res = arg2vec_labels(c, emb, 2);
  CHECK(res.missing == 0);
  CHECK(res.lemma_cluster.at("cook") == res.lemma_cluster.at("chef"));
  CHECK(res.lemma_cluster.at("apple") == res.lemma_cluster.at("pear"));
  CHECK(res.lemma_cluster.at("cook") != res.lemma_cluster.at("apple"));

  auto s = clustering_from_records(res.records);
  CHECK(s.purity == 1.0);
  CHECK(s.collocation == 1.0);

  // rerun is bitwise identical
  auto res2 = arg2vec_labels(c, emb, 2);
  CHECK(res2.records == res.records);
  CHECK(res2.lemma_cluster == res.lemma_cluster);
}

TEST_CASE("arg2vec singleton cut is pure when lemmas are unambiguous") {
  Corpus c = corpus_of({
      inst("eat", {{"cook", "A0"}, {"apple", "A1"}}),
      inst("eat", {{"cook", "A0"}, {"pear", "A1"}}),
  });
  EmbeddingTable emb;
  emb["cook"] = Eigen::Vector2d(1.0, 0.0);
  emb["apple"] = Eigen::Vector2d(0.9, 0.1);
  emb["pear"] = Eigen::Vector2d(0.8, 0.3);
  auto res = arg2vec_labels(c, emb, 3);
  std::set<std::string> names;
  for (const auto& [lemma, cluster] : res.lemma_cluster) names.insert(cluster);
  CHECK(names.size() == 3);
  CHECK(clustering_from_records(res.records).purity == 1.0);
}

TEST_CASE("arg2vec parks missing lemmas in flagged singletons") {
  Corpus c = corpus_of({
      inst("eat", {{"cook", "A0"}, {"gizmo", "A1"}}),
  });
  EmbeddingTable emb;
  emb["cook"] = Eigen::Vector2d(1.0, 0.0);
  auto res = arg2vec_labels(c, emb, 2);
  CHECK(res.missing == 1);
  CHECK(res.lemma_cluster.at("gizmo") == "oov:gizmo");
  CHECK(res.records[0].predicted[1] == "oov:gizmo");

  CHECK_THROWS_AS(arg2vec_labels(c, emb, 0), ConfigError);
}
