#pragma once

#include <cstdint>

#include "srlx/model.hpp"

namespace srlx {

struct AugmentConfig {
  size_t n_per_pred = 1000;
  size_t max_sentence_length = 45;
};

struct AugmentStats {
  size_t predicates = 0;  // distinct target predicate lemmas
  size_t missing = 0;     // targets with no instance in the pool
  size_t instances = 0;
};

// Pseudo-labeled training material: for every predicate lemma occurring in
// `targets`, samples up to n_per_pred of its instances from the unlabeled
// pool (without replacement, seeded per predicate so the pool's ordering is
// irrelevant) and stamps the labeler's argmax roles onto their arguments.
// Overlong sentences are excluded before sampling.
Corpus pseudo_label_augment(const Model& labeler, const Corpus& pool,
                            const Corpus& targets, const AugmentConfig& cfg,
                            uint64_t seed, AugmentStats* stats = nullptr);

}  // namespace srlx
