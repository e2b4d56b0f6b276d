#include "srlx/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace srlx {

AccuracyReport labeling_accuracy(const Model& model, const Corpus& corpus) {
  AccuracyReport rep;
  for (const auto& sent : corpus.sentences) {
    for (const auto& inst : sent.predicates) {
      bool any_gold = false;
      for (const auto& a : inst.arguments) any_gold |= a.gold_role.has_value();
      if (!any_gold) continue;
      auto pred = model.predict_roles(sent, inst);
      for (size_t i = 0; i < inst.arguments.size(); ++i) {
        if (!inst.arguments[i].gold_role) continue;
        ++rep.total;
        if (pred[i] == *inst.arguments[i].gold_role) ++rep.correct;
      }
    }
  }
  return rep;
}

std::vector<InstanceRef> corpus_refs(const Corpus& corpus) {
  std::vector<InstanceRef> refs;
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    const auto& preds = corpus.sentences[si].predicates;
    for (size_t pi = 0; pi < preds.size(); ++pi) {
      if (preds[pi].arguments.empty()) continue;
      refs.push_back({static_cast<int>(si), static_cast<int>(pi)});
    }
  }
  return refs;
}

Trainer::Trainer(Model& model, const TrainConfig& cfg)
    : model_(&model),
      cfg_(cfg),
      opt_(model.store(), cfg.lr, cfg.rho, cfg.adadelta_eps, cfg.clip_norm) {
  if (cfg.batch_verbal == 0 || cfg.batch_nominal == 0 || cfg.max_epochs < 1 ||
      cfg.patience < 0) {
    throw ConfigError("bad training configuration");
  }
  cfg_.objective.discriminative_only = cfg.discriminative_only;
}

double Trainer::current_tau() const {
  double tau = cfg_.objective.gumbel.temperature;
  if (cfg_.tau_anneal_to <= 0.0 || cfg_.max_epochs <= 1) return tau;
  double frac = static_cast<double>(epoch_) /
                static_cast<double>(cfg_.max_epochs - 1);
  return tau + (cfg_.tau_anneal_to - tau) * frac;
}

LossBreakdown Trainer::step(const Corpus* nominal,
                            const std::vector<InstanceRef>& bn,
                            const Corpus* verbal,
                            const std::vector<InstanceRef>& bv) {
  ObjectiveConfig ocfg = cfg_.objective;
  ocfg.gumbel.temperature = current_tau();
  nn::Graph g;
  LossBreakdown lb = joint_loss(g, *model_, nominal, bn, verbal, bv, ocfg,
                                cfg_.seed, step_, /*backward=*/true);
  if (lb.instances == 0) return lb;  // nothing to learn from, no update
  if (!std::isfinite(lb.total)) {
    diverged_ = true;
    model_->store().zero_grads();
    return lb;
  }
  if (!opt_.step()) {
    diverged_ = true;
    return lb;
  }
  ++step_;
  return lb;
}

void Trainer::snapshot_best() {
  best_params_.clear();
  model_->store().for_each([&](const nn::Tensor& t) {
    best_params_.emplace_back(t.name, t.value);
  });
  have_best_ = true;
}

void Trainer::restore_best() {
  if (!have_best_) return;
  for (const auto& [name, value] : best_params_) {
    model_->store().get(name)->value = value;
  }
}

namespace {

std::vector<std::vector<InstanceRef>> chunk(const std::vector<InstanceRef>& refs,
                                            size_t batch) {
  std::vector<std::vector<InstanceRef>> out;
  for (size_t i = 0; i < refs.size(); i += batch) {
    out.emplace_back(refs.begin() + i,
                     refs.begin() + std::min(i + batch, refs.size()));
  }
  return out;
}

}  // namespace

TrainResult Trainer::run(const Corpus& verbal, const Corpus& nominal,
                         const Corpus* augmentation, const Corpus* dev,
                         const std::string& log_path) {
  Corpus pool = verbal;
  if (augmentation != nullptr && cfg_.use_augmentation) {
    pool.sentences.insert(pool.sentences.end(),
                          augmentation->sentences.begin(),
                          augmentation->sentences.end());
  }
  std::vector<InstanceRef> refs_v = corpus_refs(pool);
  std::vector<InstanceRef> refs_n =
      cfg_.discriminative_only ? std::vector<InstanceRef>{}
                               : corpus_refs(nominal);
  if (refs_v.empty()) throw DataError("no labeled instances to train on");

  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::app);
    if (!log) throw ConfigError("cannot open training log: " + log_path);
  }

  TrainResult res;
  res.diverged = diverged_;
  for (; epoch_ < cfg_.max_epochs && !diverged_;) {
    Rng rv = Rng::derive(cfg_.seed, {0xE70C, static_cast<uint64_t>(epoch_), 1});
    std::vector<InstanceRef> ov = refs_v;
    rv.shuffle(ov);
    Rng rn = Rng::derive(cfg_.seed, {0xE70C, static_cast<uint64_t>(epoch_), 2});
    std::vector<InstanceRef> on = refs_n;
    rn.shuffle(on);
    auto bv = chunk(ov, cfg_.batch_verbal);
    auto bn = chunk(on, cfg_.batch_nominal);

    double loss_sum = 0.0;
    size_t steps_this_epoch = 0;
    size_t iv = 0, in = 0;
    bool verbal_turn = true;
    while (iv < bv.size() || in < bn.size()) {
      LossBreakdown lb;
      if (verbal_turn && iv < bv.size()) {
        lb = step(nullptr, {}, &pool, bv[iv++]);
      } else if (!verbal_turn && in < bn.size()) {
        lb = step(&nominal, bn[in++], nullptr, {});
      } else {
        verbal_turn = !verbal_turn;
        continue;
      }
      verbal_turn = !verbal_turn;
      if (diverged_) break;
      if (lb.instances > 0) {
        loss_sum += lb.total;
        ++steps_this_epoch;
        ++res.steps_run;
        if (log) {
          nlohmann::json line = {{"step", step_},
                                 {"epoch", epoch_},
                                 {"total", lb.total},
                                 {"reconstruction", lb.reconstruction},
                                 {"kl_z", lb.kl_z},
                                 {"kl_y", lb.kl_y},
                                 {"discriminative", lb.discriminative},
                                 {"instances", lb.instances}};
          log << line.dump() << "\n";
        }
      }
    }
    if (diverged_) {
      restore_best();
      res.diverged = true;
      break;
    }

    EpochRecord er;
    er.epoch = epoch_;
    er.mean_loss =
        steps_this_epoch == 0 ? 0.0 : loss_sum / static_cast<double>(steps_this_epoch);
    ++epoch_;

    if (dev != nullptr) {
      er.dev_accuracy = labeling_accuracy(*model_, *dev).accuracy();
      if (er.dev_accuracy > best_dev_) {
        best_dev_ = er.dev_accuracy;
        best_epoch_ = er.epoch;
        since_improve_ = 0;
        snapshot_best();
        er.improved = true;
      } else {
        ++since_improve_;
      }
    }
    res.epochs.push_back(er);
    if (log) {
      nlohmann::json line = {{"epoch", er.epoch},
                             {"mean_loss", er.mean_loss},
                             {"dev_accuracy", er.dev_accuracy},
                             {"improved", er.improved}};
      log << line.dump() << "\n";
    }
    if (dev != nullptr && since_improve_ >= cfg_.patience) break;
  }

  if (dev != nullptr) restore_best();
  res.best_dev_accuracy = best_dev_;
  res.best_epoch = best_epoch_;
  res.epochs_run = epoch_;
  res.steps_run = step_;
  return res;
}

void Trainer::save_checkpoint(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  model_->store().save(dir + "/params.bin");
  opt_.save(dir + "/opt.bin");
  if (have_best_) {
    std::vector<std::pair<std::string, const nn::Mat*>> entries;
    entries.reserve(best_params_.size());
    for (const auto& [name, value] : best_params_) {
      entries.emplace_back(name, &value);
    }
    nn::write_tensor_file(dir + "/best.bin", entries);
  }
  nlohmann::json state = {{"epoch", epoch_},
                          {"step", step_},
                          {"best_dev", best_dev_},
                          {"best_epoch", best_epoch_},
                          {"since_improve", since_improve_},
                          {"diverged", diverged_},
                          {"have_best", have_best_},
                          {"seed", cfg_.seed}};
  std::ofstream out(dir + "/state.json");
  if (!out) throw ConfigError("cannot write checkpoint state: " + dir);
  out << state.dump(2) << "\n";
}

void Trainer::load_checkpoint(const std::string& dir) {
  std::ifstream in(dir + "/state.json");
  if (!in) throw ConfigError("cannot read checkpoint state: " + dir);
  nlohmann::json state = nlohmann::json::parse(in);
  if (state.at("seed").get<uint64_t>() != cfg_.seed) {
    throw ConfigError("checkpoint was written under a different seed");
  }
  epoch_ = state.at("epoch").get<int>();
  step_ = state.at("step").get<uint64_t>();
  best_dev_ = state.at("best_dev").get<double>();
  best_epoch_ = state.at("best_epoch").get<int>();
  since_improve_ = state.at("since_improve").get<int>();
  diverged_ = state.at("diverged").get<bool>();
  have_best_ = state.at("have_best").get<bool>();

  model_->store().load(dir + "/params.bin");
  opt_.load(dir + "/opt.bin");
  best_params_.clear();
  if (have_best_) {
    auto entries = nn::read_tensor_file(dir + "/best.bin");
    for (auto& [name, value] : entries) {
      best_params_.emplace_back(name, std::move(value));
    }
  }
}

}  // namespace srlx
