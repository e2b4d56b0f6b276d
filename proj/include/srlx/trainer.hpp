#pragma once

#include <string>
#include <vector>

#include "srlx/objective.hpp"
#include "srlx/optimizer.hpp"

namespace srlx {

struct TrainConfig {
  ObjectiveConfig objective;
  uint64_t seed = 1;
  size_t batch_verbal = 32;
  size_t batch_nominal = 32;
  int max_epochs = 50;
  int patience = 5;  // consecutive non-improving epochs tolerated; 0 = one epoch
  double lr = 1.0;
  double rho = 0.95;
  double adadelta_eps = 1e-6;
  double clip_norm = 5.0;
  // anneal the relaxation temperature linearly to this value over the run
  // when positive; 0 keeps objective.gumbel.temperature fixed
  double tau_anneal_to = 0.0;
  // labeler trained on verbal gold alone: no nominal batches, no generative
  // terms; this is the direct-transfer configuration
  bool discriminative_only = false;
  bool use_augmentation = true;
};

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double dev_accuracy = -1.0;
  bool improved = false;
};

struct TrainResult {
  double best_dev_accuracy = -1.0;
  int best_epoch = -1;
  int epochs_run = 0;
  uint64_t steps_run = 0;
  bool diverged = false;
  std::vector<EpochRecord> epochs;
};

struct AccuracyReport {
  size_t correct = 0;
  size_t total = 0;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
  }
};

// argmax labeling accuracy over every argument that carries a gold role
AccuracyReport labeling_accuracy(const Model& model, const Corpus& corpus);

// references to every instance with at least one argument
std::vector<InstanceRef> corpus_refs(const Corpus& corpus);

class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& cfg);

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  // one optimizer update over the given batches; returns the loss read
  // before the update. A non-finite loss aborts the update and marks the
  // trainer diverged.
  LossBreakdown step(const Corpus* nominal, const std::vector<InstanceRef>& bn,
                     const Corpus* verbal, const std::vector<InstanceRef>& bv);

  // epoch loop with per-domain shuffles, alternating batches, per-epoch dev
  // scoring, early stopping, and best-parameter tracking. dev may be null
  // (runs all epochs, keeps final parameters). On return the model holds the
  // best parameters seen. log_path, when nonempty, receives line-delimited
  // step and epoch records.
  TrainResult run(const Corpus& verbal, const Corpus& nominal,
                  const Corpus* augmentation, const Corpus* dev,
                  const std::string& log_path = "");

  // params, best params, optimizer accumulators, and counters; resuming and
  // continuing reproduces an uninterrupted run bit for bit
  void save_checkpoint(const std::string& dir) const;
  void load_checkpoint(const std::string& dir);

  uint64_t steps() const { return step_; }
  int epoch() const { return epoch_; }
  bool diverged() const { return diverged_; }
  double best_dev() const { return best_dev_; }

 private:
  double current_tau() const;
  void snapshot_best();
  void restore_best();

  Model* model_;
  TrainConfig cfg_;
  Adadelta opt_;
  uint64_t step_ = 0;
  int epoch_ = 0;
  double best_dev_ = -1.0;
  int best_epoch_ = -1;
  int since_improve_ = 0;
  bool diverged_ = false;
  bool have_best_ = false;
  std::vector<std::pair<std::string, nn::Mat>> best_params_;
};

}  // namespace srlx
