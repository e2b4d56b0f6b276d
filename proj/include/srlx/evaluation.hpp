#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srlx/model.hpp"

namespace srlx {

// one predicate instance's labeling: predicted role (or cluster id) per
// argument, gold role where known, and whether the argument is the predicate
// token itself
struct PredictionRecord {
  std::string instance;
  std::vector<std::string> predicted;
  std::vector<std::optional<std::string>> gold;
  std::vector<uint8_t> self_loop;

  bool operator==(const PredictionRecord&) const = default;
};

void save_predictions(const std::string& path,
                      const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> load_predictions(const std::string& path);

// run the labeler over every instance; gold is copied from the corpus when
// present, so evaluating against a revealed corpus needs nothing extra
std::vector<PredictionRecord> label_corpus(const Model& model,
                                           const Corpus& corpus);

struct RoleScore {
  size_t gold_count = 0;
  size_t predicted_count = 0;
  size_t correct = 0;
  double precision() const {
    return predicted_count == 0 ? 0.0
                                : static_cast<double>(correct) / predicted_count;
  }
  double recall() const {
    return gold_count == 0 ? 0.0 : static_cast<double>(correct) / gold_count;
  }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

struct ScoreOptions {
  bool drop_self_loops = false;
  bool macro_all = false;  // default: micro over arguments
};

struct SupervisedScores {
  std::map<std::string, RoleScore> per_role;
  RoleScore adjuncts;  // AM-* pooled
  double accuracy = 0.0;
  double all_f1 = 0.0;
  size_t arguments = 0;
};

// arguments without gold are skipped; an argument counts toward accuracy
// when predicted == gold
SupervisedScores supervised_scores(const std::vector<PredictionRecord>& records,
                                   const ScoreOptions& opts = {});

struct ClusteringScores {
  double purity = 0.0;
  double collocation = 0.0;
  double f1 = 0.0;
};

ClusteringScores clustering_scores(const std::vector<std::string>& clusters,
                                   const std::vector<std::string>& gold);
// flattens records, skipping arguments without gold
ClusteringScores clustering_from_records(
    const std::vector<PredictionRecord>& records,
    const ScoreOptions& opts = {});

using LemmaCounts = std::map<std::string, size_t>;

// overlap of two empirical lemma distributions, in [0, 1]
double bhattacharyya(const LemmaCounts& a, const LemmaCounts& b);

// change in overlap caused by removing every occurrence of the lemma from
// both samples; nullopt when the removal empties a sample
std::optional<double> argument_contribution(const LemmaCounts& a,
                                            const LemmaCounts& b,
                                            const std::string& lemma);

struct BCConfig {
  size_t min_pair_count = 100;     // instances of the (predicate, role) pair
  size_t min_argument_count = 20;  // lemma occurrences needed for a ranking row
};

struct BCContribution {
  std::string lemma;
  double delta = 0.0;
  bool defined = true;
};

struct BCEntry {
  std::string predicate;
  std::string role;
  double bc = 0.0;
  size_t verbal_count = 0;
  size_t nominal_count = 0;
  std::vector<BCContribution> contributions;  // descending delta
};

// cross-domain selectional-preference overlap per (predicate, role); both
// corpora must carry roles on their arguments
std::vector<BCEntry> bc_report(const Corpus& verbal, const Corpus& nominal,
                               const BCConfig& cfg = {});

}  // namespace srlx
