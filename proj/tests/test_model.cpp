#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "srlx/model.hpp"
#include "srlx/nn/gradcheck.hpp"

using namespace srlx;

namespace {

bool bit_equal(const nn::Mat& a, const nn::Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

Token tok(const std::string& lemma, const std::string& pos) {
  return Token{lemma + "s", lemma, pos, std::nullopt, "DEP"};
}

// two tiny hand corpora; heads and deprels are irrelevant to the networks
Corpus tiny_verbal() {
  Corpus c;
  c.domain = Domain::Verbal;
  AnnotatedSentence s1;
  s1.tokens = {tok("the", "DT"),  tok("cat", "NN"),   tok("eat", "VBD"),
               tok("fresh", "JJ"), tok("fish", "NN"), tok("today", "RB")};
  PredicateInstance p1;
  p1.token_index = 2;
  p1.lemma = "eat";
  p1.domain = Domain::Verbal;
  p1.arguments = {{1, "cat", "A0"}, {4, "fish", "A1"}, {5, "today", "AM-TMP"}};
  s1.predicates.push_back(p1);
  c.sentences.push_back(s1);

  AnnotatedSentence s2;
  s2.tokens = {tok("dog", "NN"), tok("chase", "VBD"), tok("cat", "NN")};
  PredicateInstance p2;
  p2.token_index = 1;
  p2.lemma = "chase";
  p2.domain = Domain::Verbal;
  p2.arguments = {{0, "dog", "A0"}, {2, "cat", "A1"}};
  s2.predicates.push_back(p2);
  c.sentences.push_back(s2);
  c.rebuild_lemma_vocab();
  return c;
}

Corpus tiny_nominal() {
  Corpus c;
  c.domain = Domain::Nominal;
  AnnotatedSentence s;
  s.tokens = {tok("the", "DT"), tok("acquisition", "NN"), tok("of", "IN"),
              tok("firm", "NN"), tok("share", "NNS")};
  PredicateInstance p;
  p.token_index = 1;
  p.lemma = "acquisition";
  p.domain = Domain::Nominal;
  p.arguments = {{3, "firm", std::nullopt}, {4, "share", std::nullopt}};
  s.predicates.push_back(p);
  c.sentences.push_back(s);
  c.rebuild_lemma_vocab();
  return c;
}

ModelVocabs tiny_vocabs() {
  Corpus v = tiny_verbal();
  Corpus n = tiny_nominal();
  return build_vocabs({&v, &n}, RoleInventory::standard());
}

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.embedding_dim = 8;
  cfg.z_dim = 6;
  cfg.labeler_hidden = 5;
  cfg.labeler_layers = 2;
  cfg.z_encoder_hidden = 5;
  cfg.ffn_hidden = 0;
  return cfg;
}

nn::Mat random_vec(Rng& rng, int n) {
  nn::Mat m(n, 1);
  for (int i = 0; i < n; ++i) m(i, 0) = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("pooled vocabularies cover both domains and keep reserved ids") {
  ModelVocabs v = tiny_vocabs();
  CHECK(v.tokens.id("<unk>") == 0);
  CHECK(v.tokens.id("<mask>") == ModelVocabs::kMaskId);
  CHECK(v.tokens.id("the") == 2);
  CHECK(v.tokens.id("acquisition") == 10);
  CHECK(v.tokens.id_or_unk("zebra") == 0);
  // argument lemmas pooled across domains, insertion order after the
  // reserved unk slot
  CHECK(v.arg_lemmas.size() == 7);
  CHECK(v.arg_lemmas.id("cat") == 1);
  CHECK(v.arg_lemmas.id("share") == 6);
  CHECK(v.predicates.size() == 4);
  CHECK(v.predicates.id("acquisition") == 3);
  CHECK(v.roles.size() == 15);
}

TEST_CASE("parameter names form the expected single-labeler inventory") {
  ModelConfig cfg = tiny_config();
  cfg.labeler_layers = 1;
  Model model(tiny_vocabs(), cfg, 7);
  std::vector<std::string> names;
  model.store().for_each(
      [&](const nn::Tensor& t) { names.push_back(t.name); });
  std::vector<std::string> expected = {
      "dec.arg_emb",
      "dec.ffn.b1",
      "dec.ffn.b2",
      "dec.ffn.w1",
      "dec.ffn.w2",
      "dec.pred_emb",
      "dec.role_emb",
      "enc.tok_emb",
      "labeler.bilstm.l0.bw.b",
      "labeler.bilstm.l0.bw.w",
      "labeler.bilstm.l0.fw.b",
      "labeler.bilstm.l0.fw.w",
      "labeler.bilstm.l0.hw.carry_w",
      "labeler.bilstm.l0.hw.gate_b",
      "labeler.bilstm.l0.hw.gate_w",
      "labeler.role_b",
      "labeler.role_w",
      "zenc.bilstm.l0.bw.b",
      "zenc.bilstm.l0.bw.w",
      "zenc.bilstm.l0.fw.b",
      "zenc.bilstm.l0.fw.w",
      "zenc.bilstm.l0.hw.carry_w",
      "zenc.bilstm.l0.hw.gate_b",
      "zenc.bilstm.l0.hw.gate_w",
      "zenc.out_b",
      "zenc.out_w",
  };
  CHECK(names == expected);
  // one role table for the decoder, one softmax layer for the labeler,
  // nothing domain-specific anywhere
  CHECK(std::count_if(names.begin(), names.end(), [](const std::string& n) {
          return n.rfind("labeler.role", 0) == 0;
        }) == 2);
}

TEST_CASE("decoder ffn width tracks the context ablation") {
  ModelVocabs v = tiny_vocabs();
  ModelConfig cfg = tiny_config();
  Model joint(v, cfg, 3);
  CHECK(joint.store().get("dec.ffn.w1")->value.cols() == 8 + 6 + 8 + 16);
  cfg.use_joint_context = false;
  Model indep(tiny_vocabs(), cfg, 3);
  CHECK(indep.store().get("dec.ffn.w1")->value.cols() == 8 + 6 + 8);
}

TEST_CASE("context vectors average the other slots") {
  Model model(tiny_vocabs(), tiny_config(), 11);
  Rng rng = Rng::derive(5, {1});
  nn::Graph g;

  SUBCASE("single argument yields zero context") {
    auto e = g.input(random_vec(rng, 8));
    auto r = g.input(random_vec(rng, 8));
    auto [ca, cy] = model.decoder().context_vectors(g, {e}, {r}, 0);
    CHECK(g.value(ca).isZero(0.0));
    CHECK(g.value(cy).isZero(0.0));
  }

  SUBCASE("three arguments, exclude the first") {
    nn::Mat m0 = random_vec(rng, 8), m1 = random_vec(rng, 8),
            m2 = random_vec(rng, 8);
    auto e0 = g.input(m0), e1 = g.input(m1), e2 = g.input(m2);
    auto r = g.input(random_vec(rng, 8));
    auto [ca, cy] = model.decoder().context_vectors(g, {e0, e1, e2}, {r, r, r},
                                                    0);
    nn::Mat want = ((m1 + m2) * 0.5).eval();
    CHECK(bit_equal(g.value(ca), want));
    CHECK(bit_equal(g.value(cy), g.value(r)));
  }

  SUBCASE("two arguments reduce to the other slot") {
    nn::Mat m0 = random_vec(rng, 8), m1 = random_vec(rng, 8);
    auto e0 = g.input(m0), e1 = g.input(m1);
    auto [ca, cy] = model.decoder().context_vectors(g, {e0, e1}, {e0, e1}, 1);
    CHECK(bit_equal(g.value(ca), (m0 * 1.0).eval()));
    CHECK(bit_equal(g.value(cy), (m0 * 1.0).eval()));
  }

  SUBCASE("bad inputs throw") {
    auto e = g.input(random_vec(rng, 8));
    CHECK_THROWS_AS(model.decoder().context_vectors(g, {}, {}, 0), DataError);
    CHECK_THROWS_AS(model.decoder().context_vectors(g, {e}, {e, e}, 0),
                    DataError);
    CHECK_THROWS_AS(model.decoder().context_vectors(g, {e}, {e}, 1), DataError);
  }
}

TEST_CASE("hard and one-hot relaxed role embeddings coincide exactly") {
  Model model(tiny_vocabs(), tiny_config(), 13);
  nn::Graph g;
  auto hard = model.decoder().role_embedding(g, RoleVector::gold(4));
  nn::Mat onehot = nn::Mat::Zero(15, 1);
  onehot(4, 0) = 1.0;
  auto relaxed =
      model.decoder().role_embedding(g, RoleVector::soft(g.input(onehot)));
  CHECK(bit_equal(g.value(hard), g.value(relaxed)));

  CHECK_THROWS_AS(model.decoder().role_embedding(g, RoleVector{-1, -1}),
                  DataError);
  auto both = RoleVector{relaxed, 2};
  CHECK_THROWS_AS(model.decoder().role_embedding(g, both), DataError);
  CHECK_THROWS_AS(model.decoder().role_embedding(g, RoleVector::gold(15)),
                  DataError);
  auto short_vec = g.input(nn::Mat::Zero(3, 1));
  CHECK_THROWS_AS(
      model.decoder().role_embedding(g, RoleVector::soft(short_vec)),
      DataError);
}

TEST_CASE("argument log probabilities normalize") {
  Model model(tiny_vocabs(), tiny_config(), 17);
  Rng rng = Rng::derive(9, {2});
  nn::Graph g;
  auto pred = g.input(random_vec(rng, 8));
  auto z = g.input(random_vec(rng, 6));
  auto role = model.decoder().role_embedding(g, RoleVector::gold(1));
  auto ca = g.input(random_vec(rng, 8));
  auto cy = g.input(random_vec(rng, 8));
  auto logits = model.decoder().argument_logits(g, pred, z, role, ca, cy);
  const nn::Mat& lp = g.value(logits);
  REQUIRE(lp.rows() == 7);
  double mass = 0.0;
  for (int i = 0; i < lp.rows(); ++i) {
    CHECK(lp(i, 0) < 0.0);
    mass += std::exp(lp(i, 0));
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(model.decoder().argument_logits(g, pred, z, role, -1, -1),
                  DataError);
}

TEST_CASE("pseudolikelihood matches a direct reimplementation") {
  Model model(tiny_vocabs(), tiny_config(), 19);
  const Corpus verbal = tiny_verbal();
  const PredicateInstance& inst = verbal.sentences[0].predicates[0];
  const ModelVocabs& v = model.vocabs();

  Rng rng = Rng::derive(23, {0});
  nn::Mat zval = random_vec(rng, 6);
  std::vector<RoleVector> roles;
  std::vector<int> role_ids;
  for (const auto& a : inst.arguments) {
    role_ids.push_back(v.roles.id(*a.gold_role));
    roles.push_back(RoleVector::gold(role_ids.back()));
  }

  nn::Graph g;
  auto pl =
      model.decoder().pseudolikelihood(g, inst, roles, g.input(zval));
  double got = g.value(pl)(0, 0);
  CHECK(got < 0.0);

  // independent reading of the same parameters: for each slot, the lemma's
  // log probability from [pred; z; role; mean other args; mean other roles]
  const nn::Mat& pe = model.store().get("dec.pred_emb")->value;
  const nn::Mat& re = model.store().get("dec.role_emb")->value;
  const nn::Mat& ae = model.store().get("dec.arg_emb")->value;
  const nn::Mat& w1 = model.store().get("dec.ffn.w1")->value;
  const nn::Mat& b1 = model.store().get("dec.ffn.b1")->value;
  const nn::Mat& w2 = model.store().get("dec.ffn.w2")->value;
  const nn::Mat& b2 = model.store().get("dec.ffn.b2")->value;

  size_t m = inst.arguments.size();
  nn::Mat pred_vec = pe.row(v.predicates.id(inst.lemma)).transpose();
  std::vector<nn::Mat> argv(m), rolev(m);
  std::vector<int> targets(m);
  for (size_t i = 0; i < m; ++i) {
    targets[i] = v.arg_lemmas.id(inst.arguments[i].lemma);
    argv[i] = ae.row(targets[i]).transpose();
    rolev[i] = re.row(role_ids[i]).transpose();
  }
  double want = 0.0;
  for (size_t i = 0; i < m; ++i) {
    nn::Mat ca = nn::Mat::Zero(8, 1), cy = nn::Mat::Zero(8, 1);
    for (size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      ca += argv[j];
      cy += rolev[j];
    }
    ca /= static_cast<double>(m - 1);
    cy /= static_cast<double>(m - 1);
    nn::Mat x(8 + 6 + 8 + 8 + 8, 1);
    x << pred_vec, zval, rolev[i], ca, cy;
    nn::Mat h = (w1 * x + b1).array().tanh().matrix();
    nn::Mat logits = w2 * h + b2;
    double mx = logits.maxCoeff();
    double lse = std::log((logits.array() - mx).exp().sum()) + mx;
    want += logits(targets[i], 0) - lse;
  }
  CHECK(got == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("pseudolikelihood is bitwise invariant to argument list order") {
  Model model(tiny_vocabs(), tiny_config(), 29);
  Corpus verbal = tiny_verbal();
  PredicateInstance inst = verbal.sentences[0].predicates[0];
  const ModelVocabs& v = model.vocabs();

  std::vector<RoleVector> roles;
  for (const auto& a : inst.arguments)
    roles.push_back(RoleVector::gold(v.roles.id(*a.gold_role)));
  nn::Mat zval = nn::Mat::Zero(6, 1);

  nn::Graph g1;
  double a = g1.value(model.decoder().pseudolikelihood(g1, inst, roles,
                                                       g1.input(zval)))(0, 0);

  // rotate the slot list together with its role list
  PredicateInstance rotated = inst;
  std::rotate(rotated.arguments.begin(), rotated.arguments.begin() + 1,
              rotated.arguments.end());
  std::rotate(roles.begin(), roles.begin() + 1, roles.end());
  nn::Graph g2;
  double b = g2.value(model.decoder().pseudolikelihood(g2, rotated, roles,
                                                       g2.input(zval)))(0, 0);
  CHECK(a == b);

  SUBCASE("argument count errors") {
    nn::Graph g3;
    PredicateInstance empty = inst;
    empty.arguments.clear();
    CHECK_THROWS_AS(
        model.decoder().pseudolikelihood(g3, empty, {}, g3.input(zval)),
        DataError);
    roles.pop_back();
    CHECK_THROWS_AS(
        model.decoder().pseudolikelihood(g3, inst, roles, g3.input(zval)),
        DataError);
  }
}

TEST_CASE("single-argument pseudolikelihood uses zero context") {
  Model model(tiny_vocabs(), tiny_config(), 31);
  Corpus verbal = tiny_verbal();
  PredicateInstance inst = verbal.sentences[1].predicates[0];
  inst.arguments.resize(1);  // just "dog" / A0
  const ModelVocabs& v = model.vocabs();
  std::vector<RoleVector> roles{RoleVector::gold(v.roles.id("A0"))};
  nn::Mat zval = nn::Mat::Zero(6, 1);

  nn::Graph g;
  double got = g.value(model.decoder().pseudolikelihood(g, inst, roles,
                                                        g.input(zval)))(0, 0);

  nn::Graph g2;
  auto pred = g2.row(g2.param(model.store().get("dec.pred_emb")),
                     v.predicates.id("chase"));
  auto role = model.decoder().role_embedding(g2, roles[0]);
  auto zero = g2.input(nn::Mat::Zero(8, 1));
  auto logits = model.decoder().argument_logits(g2, pred, g2.input(zval), role,
                                                zero, zero);
  double want = g2.value(g2.pick(logits, v.arg_lemmas.id("dog")))(0, 0);
  CHECK(got == want);
}

TEST_CASE("decoder gradients agree with finite differences") {
  ModelConfig cfg = tiny_config();
  cfg.labeler_layers = 1;
  Model model(tiny_vocabs(), cfg, 37);
  Corpus verbal = tiny_verbal();
  const PredicateInstance& inst = verbal.sentences[0].predicates[0];
  const ModelVocabs& v = model.vocabs();
  std::vector<RoleVector> roles;
  for (const auto& a : inst.arguments)
    roles.push_back(RoleVector::gold(v.roles.id(*a.gold_role)));
  Rng rng = Rng::derive(41, {0});
  nn::Mat zval = random_vec(rng, 6);

  auto loss = [&](bool back) {
    nn::Graph g;
    auto pl = model.decoder().pseudolikelihood(g, inst, roles, g.input(zval));
    auto neg = g.scale(pl, -1.0);
    if (back) g.backward(neg);
    return g.value(neg)(0, 0);
  };
  auto res = nn::grad_check(model.store(), loss);
  CAPTURE(res.worst_tensor);
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("role posteriors are distributions tied to sentence content") {
  Model model(tiny_vocabs(), tiny_config(), 43);
  Corpus verbal = tiny_verbal();
  const AnnotatedSentence& sent = verbal.sentences[0];
  const PredicateInstance& inst = sent.predicates[0];

  nn::Graph g;
  auto posts = model.encoder().label_roles(g, sent, inst);
  REQUIRE(posts.size() == 3);
  for (auto p : posts) {
    const nn::Mat& pi = g.value(p);
    REQUIRE(pi.rows() == 15);
    CHECK(pi.minCoeff() > 0.0);
    CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("changing a context token moves the posteriors") {
    AnnotatedSentence other = sent;
    other.tokens[3] = tok("dog", "NN");  // "fresh" -> "dog", not an argument
    nn::Graph g2;
    auto a = model.encoder().label_roles(g2, sent, inst);
    auto b = model.encoder().label_roles(g2, other, inst);
    CHECK_FALSE(bit_equal(g2.value(a[0]), g2.value(b[0])));
  }

  SUBCASE("the instance domain tag does not enter the computation") {
    PredicateInstance relabeled = inst;
    relabeled.domain = Domain::Nominal;
    nn::Graph g2;
    auto a = model.encoder().label_roles(g2, sent, inst);
    auto b = model.encoder().label_roles(g2, sent, relabeled);
    for (size_t i = 0; i < a.size(); ++i)
      CHECK(bit_equal(g2.value(a[i]), g2.value(b[i])));
  }

  SUBCASE("out-of-sentence argument index throws") {
    PredicateInstance bad = inst;
    bad.arguments[0].token_index = 99;
    nn::Graph g2;
    CHECK_THROWS_AS(model.encoder().label_roles(g2, sent, bad), DataError);
  }

  SUBCASE("unknown lemmas fall back to the unk embedding") {
    AnnotatedSentence oov = sent;
    oov.tokens[0] = tok("zzz", "DT");
    nn::Graph g2;
    auto a = model.encoder().label_roles(g2, oov, inst);
    CHECK(a.size() == 3);
  }
}

TEST_CASE("argument masking hides exactly the argument tokens") {
  Model model(tiny_vocabs(), tiny_config(), 47);
  Corpus verbal = tiny_verbal();
  const AnnotatedSentence& sent = verbal.sentences[0];
  const PredicateInstance& inst = sent.predicates[0];

  MaskedSentence m = model.encoder().mask_arguments(sent, inst);
  const auto& v = model.vocabs().tokens;
  std::vector<int> want = {v.id("the"),  ModelVocabs::kMaskId, v.id("eat"),
                           v.id("fresh"), ModelVocabs::kMaskId,
                           ModelVocabs::kMaskId};
  CHECK(m.token_ids == want);
  CHECK(m.predicate_index == 2);
  CHECK(m == model.encoder().mask_arguments(sent, inst));

  SUBCASE("no arguments leaves every token visible") {
    PredicateInstance bare = inst;
    bare.arguments.clear();
    MaskedSentence b = model.encoder().mask_arguments(sent, bare);
    CHECK(std::count(b.token_ids.begin(), b.token_ids.end(),
                     ModelVocabs::kMaskId) == 0);
  }
}

TEST_CASE("latent posterior ignores argument identity") {
  Model model(tiny_vocabs(), tiny_config(), 53);
  Corpus verbal = tiny_verbal();
  const AnnotatedSentence& sent = verbal.sentences[0];
  const PredicateInstance& inst = sent.predicates[0];

  AnnotatedSentence swapped = sent;
  swapped.tokens[1] = tok("dog", "NN");    // argument slot, different lemma
  swapped.tokens[4] = tok("bread", "NN");  // argument slot, unseen lemma

  MaskedSentence m1 = model.encoder().mask_arguments(sent, inst);
  MaskedSentence m2 = model.encoder().mask_arguments(swapped, inst);
  CHECK(m1 == m2);

  nn::Graph g;
  auto [mu1, lv1] = model.encoder().infer_latent(g, m1);
  auto [mu2, lv2] = model.encoder().infer_latent(g, m2);
  REQUIRE(g.value(mu1).rows() == 6);
  REQUIRE(g.value(lv1).rows() == 6);
  CHECK(bit_equal(g.value(mu1), g.value(mu2)));
  CHECK(bit_equal(g.value(lv1), g.value(lv2)));

  MaskedSentence empty;
  CHECK_THROWS_AS(model.encoder().infer_latent(g, empty), DataError);
}

TEST_CASE("encoder gradients agree with finite differences") {
  ModelConfig cfg = tiny_config();
  cfg.embedding_dim = 6;
  cfg.labeler_hidden = 4;
  cfg.z_encoder_hidden = 4;
  cfg.z_dim = 4;
  cfg.labeler_layers = 1;
  Model model(tiny_vocabs(), cfg, 59);
  Corpus verbal = tiny_verbal();
  const AnnotatedSentence& sent = verbal.sentences[0];
  const PredicateInstance& inst = sent.predicates[0];
  MaskedSentence masked = model.encoder().mask_arguments(sent, inst);

  auto loss = [&](bool back) {
    nn::Graph g;
    auto posts = model.encoder().label_roles(g, sent, inst);
    std::vector<nn::Graph::V> picks;
    for (size_t i = 0; i < posts.size(); ++i)
      picks.push_back(g.log_floor(g.pick(posts[i], static_cast<int>(i))));
    auto [mu, lv] = model.encoder().infer_latent(g, masked);
    picks.push_back(g.sum(mu));
    picks.push_back(g.sum(g.cmul(lv, lv)));
    auto total = g.add_n(picks);
    if (back) g.backward(total);
    return g.value(total)(0, 0);
  };
  auto res = nn::grad_check(model.store(), loss);
  CAPTURE(res.worst_tensor);
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("prediction is deterministic under the construction seed") {
  Corpus verbal = tiny_verbal();
  const AnnotatedSentence& sent = verbal.sentences[0];
  const PredicateInstance& inst = sent.predicates[0];

  Model a(tiny_vocabs(), tiny_config(), 61);
  Model b(tiny_vocabs(), tiny_config(), 61);
  auto ra = a.predict_roles(sent, inst);
  auto rb = b.predict_roles(sent, inst);
  REQUIRE(ra.size() == 3);
  CHECK(ra == rb);
  for (const auto& label : ra) CHECK(a.vocabs().roles.contains(label));

  Model c(tiny_vocabs(), tiny_config(), 62);
  bool any_diff = false;
  c.store().for_each([&](const nn::Tensor& t) {
    if (!bit_equal(t.value, a.store().get(t.name)->value)) any_diff = true;
  });
  CHECK(any_diff);
}
