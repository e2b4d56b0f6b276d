#pragma once

#include <cstdint>
#include <vector>

#include "srlx/model.hpp"

namespace srlx {

struct GumbelConfig {
  double temperature = 1.0;
  bool straight_through = false;
};

struct ObjectiveConfig {
  double alpha = 1.0;  // weight of the discriminative term
  GumbelConfig gumbel;
  bool mean_discriminative = false;  // average over arguments instead of sum
  // verbal batches contribute alpha * D only and nominal batches are
  // rejected; the direct-transfer training mode
  bool discriminative_only = false;
  double prob_floor = 1e-12;
};

// plain closed forms, used directly and as oracles for the graph versions
double gaussian_kl(const nn::Mat& mu, const nn::Mat& logvar);
double categorical_kl_uniform(const nn::Mat& pi, double floor = 1e-12);

// graph versions; KL(N(mu, diag sigma^2) || N(0, I)) and log K - H(pi)
nn::Graph::V gaussian_kl_node(nn::Graph& g, nn::Graph::V mu,
                              nn::Graph::V logvar);
nn::Graph::V categorical_kl_uniform_node(nn::Graph& g, nn::Graph::V pi,
                                         double floor = 1e-12);

// z = mu + exp(logvar / 2) * eps, eps frozen by the caller
nn::Graph::V reparam_z(nn::Graph& g, nn::Graph::V mu, nn::Graph::V logvar,
                       const nn::Mat& eps);

nn::Mat sample_standard_normal(Rng& rng, int n);
nn::Mat sample_gumbel(Rng& rng, int n);

// softmax((log max(pi, floor) + gumbels) / tau); hard vertex with pass-through
// gradient when straight_through is set
nn::Graph::V gumbel_softmax(nn::Graph& g, nn::Graph::V pi, const nn::Mat& gumbels,
                            const GumbelConfig& cfg, double floor = 1e-12);

// scalar nodes making up one instance's bound; ids are -1 when absent
struct BoundNodes {
  nn::Graph::V objective = -1;       // U or L (to be maximized)
  nn::Graph::V reconstruction = -1;  // log f
  nn::Graph::V kl_z = -1;
  nn::Graph::V kl_y = -1;
};

// summed values over a batch, read back after the graph is built
struct LossBreakdown {
  double reconstruction = 0.0;
  double kl_z = 0.0;
  double kl_y = 0.0;
  double discriminative = 0.0;
  double total = 0.0;
  size_t instances = 0;
  size_t skipped_empty = 0;
};

// U = E_q[log f] - KL_z - sum_i KL_y_i, one sample of (z, y~) per call,
// noise drawn from `noise` in canonical slot order (z first)
BoundNodes unlabeled_bound(nn::Graph& g, const Model& model,
                           const AnnotatedSentence& sentence,
                           const PredicateInstance& instance,
                           const ObjectiveConfig& cfg, Rng& noise);

// L = E_q[log f] - KL_z with gold one-hot roles
BoundNodes labeled_bound(nn::Graph& g, const Model& model,
                         const AnnotatedSentence& sentence,
                         const PredicateInstance& instance,
                         const ObjectiveConfig& cfg, Rng& noise);

// D = sum_i log q(gold_i | w); requires gold roles
nn::Graph::V discriminative(nn::Graph& g, const Model& model,
                            const AnnotatedSentence& sentence,
                            const PredicateInstance& instance,
                            const ObjectiveConfig& cfg);

// batch entry: indices into a corpus
struct InstanceRef {
  int sentence = -1;
  int predicate = -1;
};

// J = -sum_n U - sum_v (L + alpha D); builds the graph, optionally runs
// backward, and returns the per-term sums. Per-instance noise comes from
// Rng::derive(seed, {step, uid}) so batch composition and iteration order
// never change any instance's draws.
LossBreakdown joint_loss(nn::Graph& g, const Model& model,
                         const Corpus* nominal,
                         const std::vector<InstanceRef>& batch_n,
                         const Corpus* verbal,
                         const std::vector<InstanceRef>& batch_v,
                         const ObjectiveConfig& cfg, uint64_t seed,
                         uint64_t step, bool backward);

uint64_t instance_uid(Domain domain, const InstanceRef& ref);

}  // namespace srlx
