#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srlx/corpus.hpp"

namespace srlx {

// Two-domain corpus generator whose role->lemma selectional preferences are
// shared across domains by construction while context vocabularies are
// disjoint. Roles are paired; paired roles emit from a common lemma block
// with probability shared_mass, which caps lemma-only recovery below 100%
// and leaves headroom only joint assignment can claim.
struct SyntheticConfig {
  size_t roles = 6;                  // K, taken as a prefix of the inventory
  size_t lemmas_per_role = 12;       // own block size
  size_t shared_lemmas_per_pair = 8; // block shared within a role pair
  double shared_mass = 0.5;          // probability of emitting from the shared block
  size_t predicates = 8;
  size_t context_vocab = 30;         // per-domain, disjoint across domains
  double cue_rate = 0.7;             // verbal-only role cue after an argument
  size_t min_args = 2;
  size_t max_args = 3;
  size_t min_context = 2;
  size_t max_context = 5;
  size_t verbal_instances = 2000;
  size_t nominal_instances = 2000;
};

struct SyntheticOracle {
  RoleInventory roles;
  std::vector<std::string> argument_lemmas;
  // rows roles, columns argument_lemmas, each row sums to 1
  std::vector<std::vector<double>> lemma_given_role;
  std::vector<std::string> predicate_lemmas_verbal;
  std::vector<std::string> predicate_lemmas_nominal;
  std::vector<std::string> context_vocab_verbal;
  std::vector<std::string> context_vocab_nominal;
  uint64_t seed = 0;
  // gold roles of the nominal corpus: [sentence][predicate][slot]
  std::vector<std::vector<std::vector<std::string>>> hidden_nominal_roles;

  // accuracy of the best per-lemma classifier under the uniform role prior
  double bayes_accuracy() const;
  // copy of the generated nominal corpus with hidden gold roles filled in
  Corpus reveal(const Corpus& nominal) const;
};

struct SyntheticResult {
  Corpus verbal;   // gold-labeled
  Corpus nominal;  // unlabeled; oracle holds the hidden roles
  SyntheticOracle oracle;
};

SyntheticResult generate_synthetic(const SyntheticConfig& cfg, uint64_t seed);

}  // namespace srlx
