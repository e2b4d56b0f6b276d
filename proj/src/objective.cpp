#include "srlx/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace srlx {

double gaussian_kl(const nn::Mat& mu, const nn::Mat& logvar) {
  if (mu.rows() != logvar.rows() || mu.cols() != 1 || logvar.cols() != 1) {
    throw ConfigError("gaussian_kl expects matching column vectors");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mu.rows(); ++i) {
    acc += std::exp(logvar(i, 0)) + mu(i, 0) * mu(i, 0) - 1.0 - logvar(i, 0);
  }
  return 0.5 * acc;
}

double categorical_kl_uniform(const nn::Mat& pi, double floor) {
  if (pi.cols() != 1 || pi.rows() < 1) {
    throw ConfigError("categorical_kl_uniform expects a column vector");
  }
  double acc = std::log(static_cast<double>(pi.rows()));
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    acc += pi(i, 0) * std::log(std::max(pi(i, 0), floor));
  }
  return acc;
}

nn::Graph::V gaussian_kl_node(nn::Graph& g, nn::Graph::V mu,
                              nn::Graph::V logvar) {
  auto sq = g.cmul(mu, mu);
  auto core = g.add_const(g.add(g.exp_(logvar), sq), -1.0);
  return g.scale(g.sum(g.sub(core, logvar)), 0.5);
}

nn::Graph::V categorical_kl_uniform_node(nn::Graph& g, nn::Graph::V pi,
                                         double floor) {
  double logk = std::log(static_cast<double>(g.value(pi).rows()));
  auto neg_entropy = g.sum(g.cmul(pi, g.log_floor(pi, floor)));
  return g.add_const(neg_entropy, logk);
}

nn::Graph::V reparam_z(nn::Graph& g, nn::Graph::V mu, nn::Graph::V logvar,
                       const nn::Mat& eps) {
  if (eps.rows() != g.value(mu).rows() || eps.cols() != 1) {
    throw ConfigError("reparameterization noise has the wrong shape");
  }
  auto sigma = g.exp_(g.scale(logvar, 0.5));
  return g.add(mu, g.cmul(sigma, g.input(eps)));
}

nn::Mat sample_standard_normal(Rng& rng, int n) {
  nn::Mat out(n, 1);
  for (int i = 0; i < n; ++i) out(i, 0) = rng.normal();
  return out;
}

nn::Mat sample_gumbel(Rng& rng, int n) {
  nn::Mat out(n, 1);
  for (int i = 0; i < n; ++i) out(i, 0) = rng.gumbel();
  return out;
}

nn::Graph::V gumbel_softmax(nn::Graph& g, nn::Graph::V pi, const nn::Mat& gumbels,
                            const GumbelConfig& cfg, double floor) {
  if (cfg.temperature <= 0.0) {
    throw ConfigError("gumbel temperature must be positive");
  }
  if (gumbels.rows() != g.value(pi).rows() || gumbels.cols() != 1) {
    throw ConfigError("gumbel noise has the wrong shape");
  }
  auto perturbed = g.add(g.log_floor(pi, floor), g.input(gumbels));
  auto soft = g.softmax(g.scale(perturbed, 1.0 / cfg.temperature));
  if (!cfg.straight_through) return soft;
  const nn::Mat& sv = g.value(soft);
  Eigen::Index best = 0;
  sv.col(0).maxCoeff(&best);
  nn::Mat hard = nn::Mat::Zero(sv.rows(), 1);
  hard(best, 0) = 1.0;
  // value is the vertex, gradient passes through the relaxed sample
  return g.add(g.input(hard), g.sub(soft, g.input(sv)));
}

namespace {

std::vector<size_t> canonical_order(const PredicateInstance& instance) {
  std::vector<size_t> order(instance.arguments.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return instance.arguments[a].token_index < instance.arguments[b].token_index;
  });
  return order;
}

int gold_role_id(const ModelVocabs& vocabs, const ArgumentSlot& slot) {
  if (!slot.gold_role) {
    throw DataError("labeled objective requires gold roles on every argument");
  }
  return vocabs.roles.id(*slot.gold_role);
}

// z and its KL term; z is pinned to zero when the latent variable is disabled
std::pair<nn::Graph::V, nn::Graph::V> latent_code(nn::Graph& g,
                                                  const Model& model,
                                                  const MaskedSentence& masked,
                                                  Rng& noise) {
  if (!model.cfg().use_z) {
    return {g.input(nn::Mat::Zero(model.cfg().z_dim, 1)), -1};
  }
  auto [mu, logvar] = model.encoder().infer_latent(g, masked);
  nn::Mat eps = sample_standard_normal(noise, model.cfg().z_dim);
  auto z = reparam_z(g, mu, logvar, eps);
  return {z, gaussian_kl_node(g, mu, logvar)};
}

}  // namespace

BoundNodes unlabeled_bound(nn::Graph& g, const Model& model,
                           const AnnotatedSentence& sentence,
                           const PredicateInstance& instance,
                           const ObjectiveConfig& cfg, Rng& noise) {
  MaskedSentence masked = model.encoder().mask_arguments(sentence, instance);
  auto [z, kl_z] = latent_code(g, model, masked, noise);
  auto posteriors = model.encoder().label_roles(g, sentence, instance);

  size_t m = instance.arguments.size();
  std::vector<RoleVector> roles(m);
  std::vector<nn::Graph::V> kly_terms;
  kly_terms.reserve(m);
  // draws and node creation in canonical slot order, so the bound is
  // invariant to how the argument list happens to be stored
  for (size_t slot : canonical_order(instance)) {
    nn::Mat gumb = sample_gumbel(noise, model.vocabs().roles.size());
    roles[slot] = RoleVector::soft(
        gumbel_softmax(g, posteriors[slot], gumb, cfg.gumbel, cfg.prob_floor));
    kly_terms.push_back(
        categorical_kl_uniform_node(g, posteriors[slot], cfg.prob_floor));
  }

  BoundNodes out;
  out.reconstruction = model.decoder().pseudolikelihood(g, instance, roles, z);
  out.kl_z = kl_z;
  out.kl_y = g.add_n(kly_terms);
  auto obj = g.sub(out.reconstruction, out.kl_y);
  if (kl_z >= 0) obj = g.sub(obj, kl_z);
  out.objective = obj;
  return out;
}

BoundNodes labeled_bound(nn::Graph& g, const Model& model,
                         const AnnotatedSentence& sentence,
                         const PredicateInstance& instance,
                         const ObjectiveConfig& cfg, Rng& noise) {
  (void)cfg;
  MaskedSentence masked = model.encoder().mask_arguments(sentence, instance);
  auto [z, kl_z] = latent_code(g, model, masked, noise);

  std::vector<RoleVector> roles;
  roles.reserve(instance.arguments.size());
  for (const auto& slot : instance.arguments) {
    roles.push_back(RoleVector::gold(gold_role_id(model.vocabs(), slot)));
  }

  BoundNodes out;
  out.reconstruction = model.decoder().pseudolikelihood(g, instance, roles, z);
  out.kl_z = kl_z;
  out.objective =
      kl_z >= 0 ? g.sub(out.reconstruction, kl_z) : out.reconstruction;
  return out;
}

nn::Graph::V discriminative(nn::Graph& g, const Model& model,
                            const AnnotatedSentence& sentence,
                            const PredicateInstance& instance,
                            const ObjectiveConfig& cfg) {
  auto posteriors = model.encoder().label_roles(g, sentence, instance);
  std::vector<nn::Graph::V> terms;
  terms.reserve(posteriors.size());
  for (size_t i = 0; i < posteriors.size(); ++i) {
    int gid = gold_role_id(model.vocabs(), instance.arguments[i]);
    terms.push_back(g.log_floor(g.pick(posteriors[i], gid), cfg.prob_floor));
  }
  auto total = g.add_n(terms);
  if (cfg.mean_discriminative && !terms.empty()) {
    total = g.scale(total, 1.0 / static_cast<double>(terms.size()));
  }
  return total;
}

uint64_t instance_uid(Domain domain, const InstanceRef& ref) {
  if (ref.sentence < 0 || ref.predicate < 0 || ref.predicate > 0xff) {
    throw ConfigError("instance reference out of range for uid packing");
  }
  uint64_t base = domain == Domain::Verbal ? 0x4000000000000000ull
                                           : 0x8000000000000000ull;
  return base + (static_cast<uint64_t>(ref.sentence) << 8) +
         static_cast<uint64_t>(ref.predicate);
}

namespace {

const PredicateInstance& resolve(const Corpus& corpus, const InstanceRef& ref,
                                 const AnnotatedSentence** sentence) {
  if (ref.sentence < 0 ||
      static_cast<size_t>(ref.sentence) >= corpus.sentences.size()) {
    throw DataError("batch references a sentence outside the corpus");
  }
  const auto& sent = corpus.sentences[ref.sentence];
  if (ref.predicate < 0 ||
      static_cast<size_t>(ref.predicate) >= sent.predicates.size()) {
    throw DataError("batch references a predicate outside its sentence");
  }
  *sentence = &sent;
  return sent.predicates[ref.predicate];
}

}  // namespace

LossBreakdown joint_loss(nn::Graph& g, const Model& model,
                         const Corpus* nominal,
                         const std::vector<InstanceRef>& batch_n,
                         const Corpus* verbal,
                         const std::vector<InstanceRef>& batch_v,
                         const ObjectiveConfig& cfg, uint64_t seed,
                         uint64_t step, bool backward) {
  LossBreakdown out;
  std::vector<nn::Graph::V> terms;
  terms.reserve(batch_n.size() + batch_v.size());

  auto read = [&](nn::Graph::V v) { return v >= 0 ? g.value(v)(0, 0) : 0.0; };

  if (!batch_n.empty() && nominal == nullptr) {
    throw ConfigError("nominal batch given without a nominal corpus");
  }
  if (!batch_n.empty() && cfg.discriminative_only) {
    throw ConfigError("discriminative-only training takes no nominal batches");
  }
  for (const auto& ref : batch_n) {
    const AnnotatedSentence* sent = nullptr;
    const auto& inst = resolve(*nominal, ref, &sent);
    if (inst.arguments.empty()) {
      ++out.skipped_empty;
      continue;
    }
    Rng noise =
        Rng::derive(seed, {step, instance_uid(nominal->domain, ref)});
    BoundNodes u = unlabeled_bound(g, model, *sent, inst, cfg, noise);
    terms.push_back(g.scale(u.objective, -1.0));
    out.reconstruction += read(u.reconstruction);
    out.kl_z += read(u.kl_z);
    out.kl_y += read(u.kl_y);
    ++out.instances;
  }

  if (!batch_v.empty() && verbal == nullptr) {
    throw ConfigError("verbal batch given without a verbal corpus");
  }
  for (const auto& ref : batch_v) {
    const AnnotatedSentence* sent = nullptr;
    const auto& inst = resolve(*verbal, ref, &sent);
    if (inst.arguments.empty()) {
      ++out.skipped_empty;
      continue;
    }
    auto d = discriminative(g, model, *sent, inst, cfg);
    if (cfg.discriminative_only) {
      terms.push_back(g.scale(d, -cfg.alpha));
    } else {
      Rng noise = Rng::derive(seed, {step, instance_uid(verbal->domain, ref)});
      BoundNodes l = labeled_bound(g, model, *sent, inst, cfg, noise);
      terms.push_back(
          g.scale(g.add(l.objective, g.scale(d, cfg.alpha)), -1.0));
      out.reconstruction += read(l.reconstruction);
      out.kl_z += read(l.kl_z);
    }
    out.discriminative += read(d);
    ++out.instances;
  }

  if (terms.empty()) return out;
  auto total = g.add_n(terms);
  out.total = g.value(total)(0, 0);
  if (backward) g.backward(total);
  return out;
}

}  // namespace srlx
