#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "srlx/evaluation.hpp"
#include "srlx/synthetic.hpp"

using namespace srlx;

namespace {

PredictionRecord rec(const std::string& id,
                     const std::vector<std::string>& pred,
                     const std::vector<std::string>& gold) {
  PredictionRecord r;
  r.instance = id;
  r.predicted = pred;
  for (const auto& g : gold) {
    if (g.empty()) {
      r.gold.emplace_back(std::nullopt);
    } else {
      r.gold.emplace_back(g);
    }
  }
  r.self_loop.assign(pred.size(), 0);
  return r;
}

}  // namespace

TEST_CASE("perfect predictions score one everywhere") {
  std::vector<PredictionRecord> rs = {
      rec("a", {"A0", "A1", "AM-TMP"}, {"A0", "A1", "AM-TMP"}),
      rec("b", {"A2"}, {"A2"})};
  auto s = supervised_scores(rs);
  CHECK(s.accuracy == 1.0);
  CHECK(s.all_f1 == 1.0);
  CHECK(s.arguments == 4);
  for (const auto& [role, score] : s.per_role) {
    CHECK(score.precision() == 1.0);
    CHECK(score.recall() == 1.0);
    CHECK(score.f1() == 1.0);
  }
  CHECK(s.adjuncts.f1() == 1.0);
}

TEST_CASE("two of three correct gives accuracy two thirds") {
  std::vector<PredictionRecord> rs = {
      rec("a", {"A0", "A1", "A0"}, {"A0", "A1", "A1"})};
  auto s = supervised_scores(rs);
  CHECK(s.accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.all_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("hand confusion reproduces F1 four sevenths") {
  // gold A0 four times, predicted A0 three times, two correct:
  // precision 2/3, recall 1/2
  std::vector<PredictionRecord> rs = {
      rec("a", {"A0", "A0", "A1", "A1"}, {"A0", "A0", "A0", "A0"}),
      rec("b", {"A0"}, {"A1"})};
  auto s = supervised_scores(rs);
  const RoleScore& a0 = s.per_role.at("A0");
  CHECK(a0.precision() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(a0.recall() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a0.f1() == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("adjunct roles pool into one aggregate") {
  std::vector<PredictionRecord> rs = {
      rec("a", {"AM-TMP", "AM-LOC", "A0", "AM-TMP"},
          {"AM-TMP", "AM-TMP", "AM-LOC", "A1"})};
  auto s = supervised_scores(rs);
  // gold adjuncts: AM-TMP x2, AM-LOC x1; predicted adjuncts: 3; correct: 1
  CHECK(s.adjuncts.gold_count == 3);
  CHECK(s.adjuncts.predicted_count == 3);
  CHECK(s.adjuncts.correct == 1);
  CHECK(s.adjuncts.f1() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("scores agree with an independent confusion-matrix oracle") {
  Rng rng = Rng::derive(77, {0});
  std::vector<std::string> roles = {"A0", "A1", "A2", "AM-TMP", "AM-LOC"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PredictionRecord> rs;
    size_t n = 1 + rng.below(40);
    std::vector<std::string> preds, golds;
    for (size_t i = 0; i < n; ++i) {
      preds.push_back(roles[rng.below(roles.size())]);
      golds.push_back(roles[rng.below(roles.size())]);
    }
    rs.push_back(rec("t", preds, golds));
    auto s = supervised_scores(rs);

    // brute force counts
    std::map<std::string, std::map<std::string, size_t>> confusion;
    for (size_t i = 0; i < n; ++i) confusion[golds[i]][preds[i]]++;
    size_t correct = 0;
    for (const auto& role : roles) {
      size_t gold_count = 0, pred_count = 0, good = 0;
      for (size_t i = 0; i < n; ++i) {
        if (golds[i] == role) ++gold_count;
        if (preds[i] == role) ++pred_count;
        if (golds[i] == role && preds[i] == role) ++good;
      }
      correct += good;
      if (gold_count + pred_count == 0) continue;
      const RoleScore& rsc = s.per_role.at(role);
      CHECK(rsc.gold_count == gold_count);
      CHECK(rsc.predicted_count == pred_count);
      CHECK(rsc.correct == good);
    }
    CHECK(s.accuracy == static_cast<double>(correct) / n);
  }
}

TEST_CASE("macro averaging and self-loop exclusion are switches") {
  PredictionRecord r = rec("a", {"A0", "A1", "A0"}, {"A0", "A1", "A1"});
  r.self_loop = {0, 0, 1};
  std::vector<PredictionRecord> rs = {r};

  ScoreOptions macro;
  macro.macro_all = true;
  auto s = supervised_scores(rs, macro);
  // A0: P 1/2, R 1 -> 2/3; A1: P 1, R 1/2 -> 2/3
  CHECK(s.all_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  ScoreOptions drop;
  drop.drop_self_loops = true;
  auto s2 = supervised_scores(rs, drop);
  CHECK(s2.arguments == 2);
  CHECK(s2.accuracy == 1.0);
}

TEST_CASE("arguments without gold are skipped") {
  std::vector<PredictionRecord> rs = {
      rec("a", {"A0", "A1"}, {"A0", ""}),
  };
  auto s = supervised_scores(rs);
  CHECK(s.arguments == 1);
  CHECK(s.accuracy == 1.0);
}

TEST_CASE("clustering metrics match the partition definitions") {
  SUBCASE("gold partition recovered exactly") {
    std::vector<std::string> c = {"x", "x", "y", "y", "z"};
    std::vector<std::string> g = {"A0", "A0", "A1", "A1", "A2"};
    auto s = clustering_scores(c, g);
    CHECK(s.purity == 1.0);
    CHECK(s.collocation == 1.0);
    CHECK(s.f1 == 1.0);
  }

  SUBCASE("four-point hand case") {
    // c1 = {g1, g1, g2}, c2 = {g2}: purity (2+1)/4; each gold class also
    // concentrates at most 2 and 1 points in one cluster, so collocation
    // (2+1)/4 as well
    std::vector<std::string> c = {"c1", "c1", "c1", "c2"};
    std::vector<std::string> g = {"g1", "g1", "g2", "g2"};
    auto s = clustering_scores(c, g);
    CHECK(s.purity == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.collocation == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.f1 == doctest::Approx(0.75).epsilon(1e-12));
  }

  SUBCASE("single cluster reproduces the published anchor") {
    // modal share 45.76% of 10000 arguments in one cluster
    std::vector<std::string> c(10000, "c0");
    std::vector<std::string> g;
    for (int i = 0; i < 4576; ++i) g.push_back("A0");
    for (int i = 0; i < 3000; ++i) g.push_back("A1");
    for (int i = 0; i < 2424; ++i) g.push_back("A2");
    auto s = clustering_scores(c, g);
    CHECK(s.purity * 100.0 == doctest::Approx(45.76).epsilon(1e-9));
    CHECK(s.collocation == 1.0);
    CHECK(s.f1 * 100.0 == doctest::Approx(62.79).epsilon(1e-4));
  }

  SUBCASE("bad input throws") {
    CHECK_THROWS_AS(clustering_scores({}, {}), DataError);
    CHECK_THROWS_AS(clustering_scores({"a"}, {"g", "g"}), DataError);
  }
}

TEST_CASE("prediction files round trip") {
  PredictionRecord r1 = rec("s0.p0", {"A0", "A1"}, {"A0", ""});
  r1.self_loop = {0, 1};
  PredictionRecord r2 = rec("s1.p0", {"c3"}, {"A2"});
  std::vector<PredictionRecord> rs = {r1, r2};

  auto path =
      (std::filesystem::temp_directory_path() / "srlx_preds.jsonl").string();
  save_predictions(path, rs);
  auto back = load_predictions(path);
  CHECK(back == rs);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_predictions("/nonexistent/preds.jsonl"), ConfigError);
}

TEST_CASE("labeling a corpus produces aligned records") {
  auto gen = generate_synthetic(
      [] {
        SyntheticConfig sc;
        sc.roles = 4;
        sc.lemmas_per_role = 3;
        sc.shared_lemmas_per_pair = 0;
        sc.predicates = 2;
        sc.context_vocab = 6;
        sc.verbal_instances = 5;
        sc.nominal_instances = 5;
        return sc;
      }(),
      3);
  ModelConfig mc;
  mc.embedding_dim = 6;
  mc.z_dim = 4;
  mc.labeler_hidden = 4;
  mc.labeler_layers = 1;
  mc.z_encoder_hidden = 4;
  Model model(build_vocabs({&gen.verbal, &gen.nominal},
                           RoleInventory::standard()),
              mc, 5);

  auto recs = label_corpus(model, gen.verbal);
  REQUIRE(recs.size() == 5);
  CHECK(recs[0].instance == "s0.p0");
  for (size_t i = 0; i < recs.size(); ++i) {
    const auto& inst = gen.verbal.sentences[i].predicates[0];
    CHECK(recs[i].predicted.size() == inst.arguments.size());
    for (size_t a = 0; a < inst.arguments.size(); ++a) {
      CHECK(recs[i].gold[a] == inst.arguments[a].gold_role);
      CHECK(model.vocabs().roles.contains(recs[i].predicted[a]));
    }
  }

  auto nom = label_corpus(model, gen.nominal);
  for (const auto& r : nom) {
    for (const auto& g : r.gold) CHECK_FALSE(g.has_value());
  }
}

TEST_CASE("distribution overlap matches hand computations") {
  LemmaCounts a = {{"x", 1}, {"y", 1}};
  CHECK(bhattacharyya(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  LemmaCounts b = {{"u", 2}, {"v", 1}};
  CHECK(bhattacharyya(a, b) == 0.0);

  LemmaCounts c = {{"x", 9}, {"y", 1}};
  CHECK(bhattacharyya(a, c) ==
        doctest::Approx(0.8944271909999159).epsilon(1e-12));
  CHECK(bhattacharyya(c, a) == bhattacharyya(a, c));

  // duplication invariance: scaling both counts changes nothing
  LemmaCounts a3 = {{"x", 3}, {"y", 3}};
  LemmaCounts c3 = {{"x", 27}, {"y", 3}};
  CHECK(bhattacharyya(a3, c3) == bhattacharyya(a, c));

  CHECK_THROWS_AS(bhattacharyya({}, a), DataError);
}

TEST_CASE("argument contributions carry the documented signs") {
  SUBCASE("absent lemma contributes zero") {
    LemmaCounts a = {{"x", 1}}, b = {{"x", 2}};
    auto d = argument_contribution(a, b, "zzz");
    REQUIRE(d.has_value());
    CHECK(*d == 0.0);
  }

  SUBCASE("sample-exclusive lemma depresses overlap") {
    LemmaCounts a = {{"x", 1}, {"y", 1}};
    LemmaCounts b = {{"x", 1}};
    auto d = argument_contribution(a, b, "y");
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(std::sqrt(0.5) - 1.0).epsilon(1e-12));
    CHECK(*d < 0.0);
  }

  SUBCASE("equal-share lemma supports overlap") {
    LemmaCounts a = {{"x", 2}, {"y", 1}, {"z", 1}};
    LemmaCounts b = {{"x", 10}, {"y", 9}, {"z", 1}};
    double before = bhattacharyya(a, b);
    auto d = argument_contribution(a, b, "x");
    REQUIRE(d.has_value());
    LemmaCounts a2 = {{"y", 1}, {"z", 1}};
    LemmaCounts b2 = {{"y", 9}, {"z", 1}};
    CHECK(*d == before - bhattacharyya(a2, b2));
    CHECK(*d > 0.0);
  }

  SUBCASE("removal that empties a sample is undefined") {
    LemmaCounts a = {{"x", 3}}, b = {{"x", 1}, {"y", 1}};
    CHECK_FALSE(argument_contribution(a, b, "x").has_value());
  }

  SUBCASE("decomposition is exactly reproducible") {
    Rng rng = Rng::derive(31, {4});
    LemmaCounts a, b;
    for (int i = 0; i < 8; ++i) {
      a["w" + std::to_string(i)] = 1 + rng.below(20);
      if (i % 2 == 0) b["w" + std::to_string(i)] = 1 + rng.below(20);
    }
    b["only_b"] = 5;
    double bc = bhattacharyya(a, b);
    for (const auto& [lemma, cnt] : a) {
      auto d = argument_contribution(a, b, lemma);
      if (!d) continue;
      LemmaCounts a2 = a, b2 = b;
      a2.erase(lemma);
      b2.erase(lemma);
      CHECK(bc - *d == bhattacharyya(a2, b2));
    }
  }
}

TEST_CASE("overlap report respects its cutoffs") {
  // two predicates; p1 frequent in both domains, p2 rare
  auto mk = [](Domain dom, const std::string& pred, size_t n,
               const std::vector<std::pair<std::string, size_t>>& lemmas) {
    Corpus c;
    c.domain = dom;
    for (size_t i = 0; i < n; ++i) {
      AnnotatedSentence s;
      s.tokens = {Token{pred, pred, dom == Domain::Verbal ? "VB" : "NN",
                        std::nullopt, "ROOT"},
                  Token{"w", "w", "NN", 0, "DEP"}};
      PredicateInstance p;
      p.token_index = 0;
      p.lemma = pred;
      p.domain = dom;
      // cycle through the lemma pool proportionally to its weights
      size_t total = 0;
      for (const auto& [l, k] : lemmas) total += k;
      size_t pick = i % total, acc = 0;
      for (const auto& [l, k] : lemmas) {
        acc += k;
        if (pick < acc) {
          p.arguments = {{1, l, std::string("A1")}};
          break;
        }
      }
      s.predicates.push_back(p);
      c.sentences.push_back(s);
    }
    c.rebuild_lemma_vocab();
    return c;
  };

  Corpus v = mk(Domain::Verbal, "buy", 40, {{"share", 1}, {"stake", 1}});
  Corpus n = mk(Domain::Nominal, "buy", 40, {{"share", 1}, {"stake", 1}});
  // a second predicate below the pair cutoff
  Corpus v2 = mk(Domain::Verbal, "sell", 4, {{"share", 1}});
  Corpus n2 = mk(Domain::Nominal, "sell", 4, {{"share", 1}});
  v.sentences.insert(v.sentences.end(), v2.sentences.begin(),
                     v2.sentences.end());
  n.sentences.insert(n.sentences.end(), n2.sentences.begin(),
                     n2.sentences.end());

  BCConfig cfg;
  cfg.min_pair_count = 10;
  cfg.min_argument_count = 8;
  auto report = bc_report(v, n, cfg);
  REQUIRE(report.size() == 1);
  CHECK(report[0].predicate == "buy");
  CHECK(report[0].role == "A1");
  CHECK(report[0].bc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report[0].verbal_count == 40);
  CHECK(report[0].nominal_count == 40);
  // identical halves: every contribution is defined and reapplying the
  // removal reproduces bc - delta
  for (const auto& c : report[0].contributions) {
    CHECK(c.defined);
  }
  CHECK(report[0].contributions.size() == 2);

  BCConfig strict;
  strict.min_pair_count = 100;
  CHECK(bc_report(v, n, strict).empty());
}
