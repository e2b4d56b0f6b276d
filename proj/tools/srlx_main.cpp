#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "srlx/augment.hpp"
#include "srlx/baselines.hpp"
#include "srlx/evaluation.hpp"
#include "srlx/identify.hpp"
#include "srlx/synthetic.hpp"
#include "srlx/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace srlx;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes, also listed in --help
constexpr int kExitGeneric = 1;
constexpr int kExitConfig = 2;   // missing files, bad settings
constexpr int kExitParse = 3;    // malformed input text
constexpr int kExitStructure = 4;
constexpr int kExitData = 5;
constexpr int kExitDiverged = 6;

std::string default_out_dir(const std::string& subcommand) {
  const char* root = std::getenv("SRLX_OUT_ROOT");
  fs::path base = (root && *root) ? fs::path(root) : fs::path(".");
  return (base / ("srlx-" + subcommand)).string();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("bad json in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a json object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

// effective settings fingerprint: canonical dump (sorted keys) hashed
std::string config_hash(const json& effective) {
  std::ostringstream hex;
  hex << "0x" << std::hex << fnv1a(effective.dump());
  return hex.str();
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    uint64_t seed, const json& effective) {
  json m;
  m["tool"] = "srlx";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["config_hash"] = config_hash(effective);
  m["settings"] = effective;
  write_json_file((fs::path(out_dir) / "manifest.json").string(), m);
}

ModelConfig model_config_from(const json& root) {
  ModelConfig m;
  if (!root.contains("model")) return m;
  const json& j = root.at("model");
  check_keys(j,
             {"embedding_dim", "z_dim", "labeler_hidden", "labeler_layers",
              "z_encoder_hidden", "ffn_hidden", "highway", "use_z",
              "use_joint_context"},
             "model config");
  m.embedding_dim = j.value("embedding_dim", m.embedding_dim);
  m.z_dim = j.value("z_dim", m.z_dim);
  m.labeler_hidden = j.value("labeler_hidden", m.labeler_hidden);
  m.labeler_layers = j.value("labeler_layers", m.labeler_layers);
  m.z_encoder_hidden = j.value("z_encoder_hidden", m.z_encoder_hidden);
  m.ffn_hidden = j.value("ffn_hidden", m.ffn_hidden);
  m.highway = j.value("highway", m.highway);
  m.use_z = j.value("use_z", m.use_z);
  m.use_joint_context = j.value("use_joint_context", m.use_joint_context);
  return m;
}

TrainConfig train_config_from(const json& root) {
  TrainConfig t;
  if (!root.contains("train")) return t;
  const json& j = root.at("train");
  check_keys(j,
             {"batch_verbal", "batch_nominal", "max_epochs", "patience", "lr",
              "rho", "adadelta_eps", "clip_norm", "alpha", "temperature",
              "straight_through", "mean_discriminative", "tau_anneal_to"},
             "train config");
  t.batch_verbal = j.value("batch_verbal", t.batch_verbal);
  t.batch_nominal = j.value("batch_nominal", t.batch_nominal);
  t.max_epochs = j.value("max_epochs", t.max_epochs);
  t.patience = j.value("patience", t.patience);
  t.lr = j.value("lr", t.lr);
  t.rho = j.value("rho", t.rho);
  t.adadelta_eps = j.value("adadelta_eps", t.adadelta_eps);
  t.clip_norm = j.value("clip_norm", t.clip_norm);
  t.tau_anneal_to = j.value("tau_anneal_to", t.tau_anneal_to);
  t.objective.alpha = j.value("alpha", t.objective.alpha);
  t.objective.gumbel.temperature =
      j.value("temperature", t.objective.gumbel.temperature);
  t.objective.gumbel.straight_through =
      j.value("straight_through", t.objective.gumbel.straight_through);
  t.objective.mean_discriminative =
      j.value("mean_discriminative", t.objective.mean_discriminative);
  return t;
}

SyntheticConfig synth_config_from(const json& root) {
  SyntheticConfig s;
  if (!root.contains("synth")) return s;
  const json& j = root.at("synth");
  check_keys(j,
             {"roles", "lemmas_per_role", "shared_lemmas_per_pair",
              "shared_mass", "predicates", "context_vocab", "cue_rate",
              "min_args", "max_args", "min_context", "max_context",
              "verbal_instances", "nominal_instances"},
             "synth config");
  s.roles = j.value("roles", s.roles);
  s.lemmas_per_role = j.value("lemmas_per_role", s.lemmas_per_role);
  s.shared_lemmas_per_pair =
      j.value("shared_lemmas_per_pair", s.shared_lemmas_per_pair);
  s.shared_mass = j.value("shared_mass", s.shared_mass);
  s.predicates = j.value("predicates", s.predicates);
  s.context_vocab = j.value("context_vocab", s.context_vocab);
  s.cue_rate = j.value("cue_rate", s.cue_rate);
  s.min_args = j.value("min_args", s.min_args);
  s.max_args = j.value("max_args", s.max_args);
  s.min_context = j.value("min_context", s.min_context);
  s.max_context = j.value("max_context", s.max_context);
  s.verbal_instances = j.value("verbal_instances", s.verbal_instances);
  s.nominal_instances = j.value("nominal_instances", s.nominal_instances);
  return s;
}

struct AugmentSettings {
  AugmentConfig cfg;
  size_t labeler_epochs = 5;  // stage-one labeler used for pseudo-labeling
};

AugmentSettings augment_config_from(const json& root) {
  AugmentSettings a;
  if (!root.contains("augment")) return a;
  const json& j = root.at("augment");
  check_keys(j, {"n_per_pred", "max_sentence_length", "labeler_epochs"},
             "augment config");
  a.cfg.n_per_pred = j.value("n_per_pred", a.cfg.n_per_pred);
  a.cfg.max_sentence_length =
      j.value("max_sentence_length", a.cfg.max_sentence_length);
  a.labeler_epochs = j.value("labeler_epochs", a.labeler_epochs);
  return a;
}

FactorizationConfig factorization_config_from(const json& root) {
  FactorizationConfig f;
  if (!root.contains("factorization")) return f;
  const json& j = root.at("factorization");
  check_keys(j, {"dim", "epochs", "batch", "lr", "rho", "eps", "clip_norm"},
             "factorization config");
  f.dim = j.value("dim", f.dim);
  f.epochs = j.value("epochs", f.epochs);
  f.batch = j.value("batch", f.batch);
  f.lr = j.value("lr", f.lr);
  f.rho = j.value("rho", f.rho);
  f.eps = j.value("eps", f.eps);
  f.clip_norm = j.value("clip_norm", f.clip_norm);
  return f;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json j = load_json_file(path);
  check_keys(j,
             {"model", "train", "synth", "augment", "factorization", "bc",
              "arg2vec", "prepare"},
             "config");
  return j;
}

json vocab_to_json(const Vocab& v) {
  return json{{"names", v.names()}, {"counts", v.counts()}};
}

Vocab vocab_from_json(const json& j) {
  auto names = j.at("names").get<std::vector<std::string>>();
  auto counts = j.at("counts").get<std::vector<int64_t>>();
  if (names.size() != counts.size())
    throw ConfigError("vocab names and counts disagree");
  Vocab v(names);
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) v.add(names[i], counts[i]);
  }
  return v;
}

void save_model_bundle(const std::string& out_dir, const Model& model,
                       uint64_t seed) {
  const ModelConfig& m = model.cfg();
  json j;
  j["seed"] = seed;
  j["model"] = {{"embedding_dim", m.embedding_dim},
                {"z_dim", m.z_dim},
                {"labeler_hidden", m.labeler_hidden},
                {"labeler_layers", m.labeler_layers},
                {"z_encoder_hidden", m.z_encoder_hidden},
                {"ffn_hidden", m.ffn_hidden},
                {"highway", m.highway},
                {"use_z", m.use_z},
                {"use_joint_context", m.use_joint_context}};
  j["vocabs"] = {{"tokens", vocab_to_json(model.vocabs().tokens)},
                 {"arg_lemmas", vocab_to_json(model.vocabs().arg_lemmas)},
                 {"predicates", vocab_to_json(model.vocabs().predicates)},
                 {"roles", model.vocabs().roles.labels()}};
  write_json_file((fs::path(out_dir) / "model.json").string(), j);
}

struct ModelBundle {
  ModelConfig cfg;
  ModelVocabs vocabs;
  uint64_t seed = 1;
};

ModelBundle load_model_bundle(const std::string& dir) {
  json j = load_json_file((fs::path(dir) / "model.json").string());
  ModelBundle b;
  b.seed = j.at("seed").get<uint64_t>();
  json root;
  root["model"] = j.at("model");
  b.cfg = model_config_from(root);
  const json& v = j.at("vocabs");
  b.vocabs.tokens = vocab_from_json(v.at("tokens"));
  b.vocabs.arg_lemmas = vocab_from_json(v.at("arg_lemmas"));
  b.vocabs.predicates = vocab_from_json(v.at("predicates"));
  b.vocabs.roles =
      RoleInventory(v.at("roles").get<std::vector<std::string>>());
  return b;
}

void apply_ablations(const std::vector<std::string>& ablate, ModelConfig& mc,
                     TrainConfig& tc) {
  for (const auto& a : ablate) {
    if (a == "z") {
      mc.use_z = false;
    } else if (a == "joint") {
      mc.use_joint_context = false;
    } else if (a == "augment") {
      tc.use_augmentation = false;
    } else {
      throw ConfigError("unknown ablation: " + a +
                        " (expected z, joint, or augment)");
    }
  }
}

std::string format_percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * x);
  return buf;
}

json role_score_json(const RoleScore& s) {
  return json{{"gold", s.gold_count},
              {"predicted", s.predicted_count},
              {"correct", s.correct},
              {"precision", s.precision()},
              {"recall", s.recall()},
              {"f1", s.f1()}};
}

std::string supervised_report_text(const SupervisedScores& s, bool macro) {
  std::ostringstream out;
  out << "role           P       R      F1    gold    pred\n";
  auto line = [&](const std::string& name, const RoleScore& r) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-10s %7s %7s %7s %7zu %7zu\n",
                  name.c_str(), format_percent(r.precision()).c_str(),
                  format_percent(r.recall()).c_str(),
                  format_percent(r.f1()).c_str(), r.gold_count,
                  r.predicted_count);
    out << buf;
  };
  for (const auto& [role, score] : s.per_role) line(role, score);
  line("AM-*", s.adjuncts);
  out << "All (" << (macro ? "macro" : "micro") << " F1)  "
      << format_percent(s.all_f1) << "\n";
  out << "accuracy " << format_percent(s.accuracy) << " over " << s.arguments
      << " arguments\n";
  return out.str();
}

std::string clustering_report_text(const ClusteringScores& s) {
  std::ostringstream out;
  // PU = mean max gold share per cluster; CO = mean max cluster share per
  // gold class; F1 = their harmonic mean
  out << "PU  " << format_percent(s.purity) << "\n";
  out << "CO  " << format_percent(s.collocation) << "\n";
  out << "F1  " << format_percent(s.f1) << "\n";
  return out.str();
}

// stage-one labeler for pseudo-labeling: the same architecture trained on
// verbal gold alone
Corpus build_augmentation(const Corpus& verbal, const Corpus& nominal,
                          const Corpus& pool, const ModelConfig& mc,
                          const TrainConfig& tc, const AugmentSettings& as,
                          uint64_t seed, AugmentStats* stats) {
  Model labeler(build_vocabs({&verbal, &nominal, &pool}, verbal.roles), mc,
                Rng::mix(seed ^ 0xA001));
  TrainConfig stage = tc;
  stage.seed = Rng::mix(seed ^ 0xA002);
  stage.discriminative_only = true;
  stage.max_epochs = static_cast<int>(as.labeler_epochs);
  stage.patience = static_cast<int>(as.labeler_epochs);
  Trainer trainer(labeler, stage);
  trainer.run(verbal, nominal, nullptr, nullptr);
  if (trainer.diverged())
    throw DataError("augmentation labeler diverged");
  return pseudo_label_augment(labeler, pool, nominal, as.cfg, seed, stats);
}

struct TrainOutcome {
  TrainResult result;
  double nominal_accuracy = -1.0;  // against eval_corpus when given
};

// shared by train, baseline direct-transfer, and sweep-augment
TrainOutcome run_training(Model& model, const Corpus& verbal,
                          const Corpus& nominal, const Corpus* augmentation,
                          const Corpus* dev, const Corpus* eval_corpus,
                          const TrainConfig& tc, const std::string& log_path) {
  Trainer trainer(model, tc);
  TrainOutcome out;
  out.result = trainer.run(verbal, nominal, augmentation, dev, log_path);
  if (eval_corpus)
    out.nominal_accuracy = labeling_accuracy(model, *eval_corpus).accuracy();
  return out;
}

json train_result_json(const TrainResult& r) {
  json epochs = json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"mean_loss", e.mean_loss},
                      {"dev_accuracy", e.dev_accuracy},
                      {"improved", e.improved}});
  }
  return json{{"best_dev_accuracy", r.best_dev_accuracy},
              {"best_epoch", r.best_epoch},
              {"epochs_run", r.epochs_run},
              {"steps_run", r.steps_run},
              {"diverged", r.diverged},
              {"epochs", epochs}};
}

int dispatch(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const StructuralError& e) {
    std::cerr << "structure error: " << e.what() << "\n";
    return kExitStructure;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "semantic-role transfer toolkit: preprocessing, synthetic corpora, "
      "semi-supervised training, baselines, and evaluation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer(
      "Default output root comes from $SRLX_OUT_ROOT (falling back to the\n"
      "working directory); --out-dir overrides it. Every subcommand writes\n"
      "manifest.json (settings, seed, config hash) next to its outputs.\n"
      "Exit codes: 1 unexpected, 2 config/missing file, 3 parse,\n"
      "4 malformed tree, 5 data invariant, 6 training diverged.");

  std::string config_path, out_dir;
  uint64_t seed = 1;
  std::vector<std::string> ablate;
  double alpha = -1.0, temperature = -1.0;
  long n_augment = -1;
  bool drop_self_loops = false;

  auto add_common = [&](CLI::App* sub, bool with_train_flags) {
    sub->add_option("--config", config_path, "json config file");
    sub->add_option("--seed", seed, "rng seed (default 1)");
    sub->add_option("--out-dir", out_dir, "output directory");
    if (with_train_flags) {
      sub->add_option("--ablate", ablate,
                      "disable a component: z, joint, or augment (repeatable)")
          ->check(CLI::IsMember({"z", "joint", "augment"}));
      sub->add_option("--alpha", alpha,
                      "weight of the discriminative term (overrides config)");
      sub->add_option("--temperature", temperature,
                      "gumbel-softmax temperature (overrides config)");
      sub->add_option("--n-augment", n_augment,
                      "pseudo-labeled instances per predicate");
    }
  };

  auto resolve_out = [&](const std::string& name) {
    std::string dir = out_dir.empty() ? default_out_dir(name) : out_dir;
    fs::create_directories(dir);
    return dir;
  };

  // prepare ----------------------------------------------------------------
  auto* prepare = app.add_subcommand(
      "prepare", "ingest CoNLL text, verbalize, replace preposition "
                 "headwords, and filter to shared predicates");
  std::string verbal_conll, nominal_conll, verbalization_path;
  size_t min_verbal = 10, min_nominal = 20;
  bool no_headword = false;
  prepare->add_option("--verbal-conll", verbal_conll, "verbal-domain CoNLL file")
      ->required();
  prepare->add_option("--nominal-conll", nominal_conll,
                      "nominal-domain CoNLL file")
      ->required();
  prepare->add_option("--verbalization", verbalization_path,
                      "tsv noun-lemma to verb-lemma map");
  prepare->add_option("--min-verbal", min_verbal,
                      "verbal instances required per predicate");
  prepare->add_option("--min-nominal", min_nominal,
                      "nominal instances required per predicate");
  prepare->add_flag("--no-headword", no_headword,
                    "skip preposition headword replacement");
  add_common(prepare, false);

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "generate the two-domain synthetic corpus with a known oracle");
  add_common(synth, false);

  // train ------------------------------------------------------------------
  auto* train = app.add_subcommand(
      "train", "semi-supervised training on labeled verbal plus unlabeled "
               "nominal instances");
  std::string verbal_path, nominal_path, dev_path, pool_path, eval_path;
  train->add_option("--verbal", verbal_path, "labeled verbal corpus (jsonl)")
      ->required();
  train->add_option("--nominal", nominal_path,
                    "unlabeled nominal corpus (jsonl)")
      ->required();
  train->add_option("--dev", dev_path, "labeled development corpus (jsonl)");
  train->add_option("--augment-pool", pool_path,
                    "unlabeled verbal pool for pseudo-label augmentation");
  add_common(train, true);

  // label ------------------------------------------------------------------
  auto* label = app.add_subcommand(
      "label", "apply a trained checkpoint to a corpus");
  std::string model_dir, input_path;
  label->add_option("--model-dir", model_dir,
                    "directory produced by train (model.json + checkpoint)")
      ->required();
  label->add_option("--input", input_path, "corpus to label (jsonl)")
      ->required();
  add_common(label, false);

  // baseline ---------------------------------------------------------------
  auto* baseline = app.add_subcommand("baseline",
                                      "run one of the comparison systems");
  std::string system, train_path, embeddings_path;
  size_t arg2vec_k = 15;
  baseline->add_option("--system", system, "baseline to run")
      ->required()
      ->check(CLI::IsMember({"most-frequent", "factorization",
                             "direct-transfer", "all-a0", "syntfun",
                             "arg2vec"}));
  baseline->add_option("--train", train_path,
                       "labeled verbal corpus for fitted baselines (jsonl)");
  baseline->add_option("--input", input_path, "corpus to label (jsonl)")
      ->required();
  baseline->add_option("--dev", dev_path,
                       "development corpus for direct-transfer");
  baseline->add_option("--embeddings", embeddings_path,
                       "lemma embedding text file for arg2vec");
  baseline->add_option("--k", arg2vec_k, "arg2vec cluster count");
  add_common(baseline, true);

  // eval -------------------------------------------------------------------
  auto* eval = app.add_subcommand(
      "eval", "score a prediction file against its gold roles");
  std::string predictions_path;
  bool clustering = false, macro = false;
  eval->add_option("--predictions", predictions_path,
                   "prediction records (jsonl)")
      ->required();
  eval->add_flag("--clustering", clustering,
                 "report purity/collocation/F1 instead of supervised scores");
  eval->add_flag("--macro", macro, "macro-average the All F1");
  eval->add_flag("--drop-self-loops", drop_self_loops,
                 "exclude arguments that are their own predicate");
  add_common(eval, false);

  // analyze-bc -------------------------------------------------------------
  auto* analyze = app.add_subcommand(
      "analyze-bc", "cross-domain selectional-preference overlap per "
                    "(predicate, role), with per-lemma contributions");
  size_t min_pair = 100, min_arg = 20, top_contrib = 10;
  analyze->add_option("--verbal", verbal_path, "labeled verbal corpus (jsonl)")
      ->required();
  analyze
      ->add_option("--nominal", nominal_path,
                   "labeled nominal corpus (jsonl)")
      ->required();
  analyze->add_option("--min-pair", min_pair,
                      "minimum instances of a (predicate, role) pair");
  analyze->add_option("--min-arg", min_arg,
                      "minimum occurrences for a contribution row");
  analyze->add_option("--top", top_contrib,
                      "contributions listed per pair in the text report");
  add_common(analyze, false);

  // identify-args ----------------------------------------------------------
  auto* identify = app.add_subcommand(
      "identify-args", "rule-based argument identification over the "
                       "dependency trees of a corpus");
  identify->add_option("--input", input_path, "corpus (jsonl)")->required();
  add_common(identify, false);

  // sweep-augment ----------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep-augment", "train across augmentation sizes and emit curve data");
  std::vector<size_t> sweep_sizes;
  sweep->add_option("--verbal", verbal_path, "labeled verbal corpus (jsonl)")
      ->required();
  sweep->add_option("--nominal", nominal_path,
                    "unlabeled nominal corpus (jsonl)")
      ->required();
  sweep->add_option("--augment-pool", pool_path,
                    "unlabeled verbal pool to draw pseudo-labeled instances "
                    "from")
      ->required();
  sweep->add_option("--dev", dev_path, "labeled development corpus (jsonl)");
  sweep->add_option("--eval", eval_path,
                    "labeled corpus scored after each run (jsonl)");
  sweep->add_option("--sizes", sweep_sizes,
                    "augmentation sizes per predicate, e.g. 0,250,1000")
      ->required()
      ->delimiter(',');
  add_common(sweep, true);

  CLI11_PARSE(app, argc, argv);

  // flag overrides folded into the config-derived settings
  auto effective_train = [&](const json& cfg_json) {
    TrainConfig tc = train_config_from(cfg_json);
    tc.seed = seed;
    if (alpha >= 0.0) tc.objective.alpha = alpha;
    if (temperature >= 0.0) tc.objective.gumbel.temperature = temperature;
    return tc;
  };
  auto effective_augment = [&](const json& cfg_json) {
    AugmentSettings as = augment_config_from(cfg_json);
    if (n_augment >= 0) as.cfg.n_per_pred = static_cast<size_t>(n_augment);
    return as;
  };
  auto settings_echo = [&](const json& cfg_json) {
    json j = cfg_json;
    j["flags"] = {{"seed", seed},
                  {"ablate", ablate},
                  {"alpha", alpha},
                  {"temperature", temperature},
                  {"n_augment", n_augment},
                  {"drop_self_loops", drop_self_loops}};
    return j;
  };

  if (prepare->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("prepare");
      json cfg_json = load_config(config_path);
      Corpus v = parse_conll(read_text_file(verbal_conll), Domain::Verbal);
      Corpus n = parse_conll(read_text_file(nominal_conll), Domain::Nominal);
      size_t verbalized = 0;
      if (!verbalization_path.empty()) {
        auto map = VerbalizationMap::load_file(verbalization_path);
        verbalized = apply_verbalization(n, map);
      }
      ReplacementStats rv, rn;
      if (!no_headword) {
        rv = replace_preposition_headwords(v);
        rn = replace_preposition_headwords(n);
      }
      FilterConfig fc;
      fc.min_verbal_instances = min_verbal;
      fc.min_nominal_instances = min_nominal;
      auto [fv, fn] = filter_corpus(v, n, fc);
      save_corpus(fv, (fs::path(dir) / "verbal.jsonl").string());
      save_corpus(fn, (fs::path(dir) / "nominal.jsonl").string());
      json stats = {
          {"verbal_sentences", fv.sentences.size()},
          {"verbal_instances", fv.instance_count()},
          {"nominal_sentences", fn.sentences.size()},
          {"nominal_instances", fn.instance_count()},
          {"verbalized_predicates", verbalized},
          {"headwords_replaced", rv.replaced + rn.replaced},
          {"headwords_flagged", rv.flagged + rn.flagged},
          {"duplicate_slots_dropped",
           rv.dropped_duplicate_slots + rn.dropped_duplicate_slots}};
      write_json_file((fs::path(dir) / "prepare_stats.json").string(), stats);
      write_manifest(dir, "prepare", seed, settings_echo(cfg_json));
      std::cout << "prepared " << fv.instance_count() << " verbal / "
                << fn.instance_count() << " nominal instances -> " << dir
                << "\n";
      return 0;
    });
  }

  if (synth->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("synth");
      json cfg_json = load_config(config_path);
      SyntheticConfig sc = synth_config_from(cfg_json);
      auto gen = generate_synthetic(sc, seed);
      save_corpus(gen.verbal, (fs::path(dir) / "verbal.jsonl").string());
      save_corpus(gen.nominal, (fs::path(dir) / "nominal.jsonl").string());
      save_corpus(gen.oracle.reveal(gen.nominal),
                  (fs::path(dir) / "nominal_revealed.jsonl").string());
      json oracle = {{"seed", seed},
                     {"bayes_accuracy", gen.oracle.bayes_accuracy()},
                     {"roles", gen.oracle.roles.labels()},
                     {"argument_lemmas", gen.oracle.argument_lemmas}};
      write_json_file((fs::path(dir) / "oracle.json").string(), oracle);
      write_manifest(dir, "synth", seed, settings_echo(cfg_json));
      std::cout << "synthesized " << gen.verbal.instance_count()
                << " verbal / " << gen.nominal.instance_count()
                << " nominal instances (bayes "
                << format_percent(gen.oracle.bayes_accuracy()) << ") -> "
                << dir << "\n";
      return 0;
    });
  }

  if (train->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("train");
      json cfg_json = load_config(config_path);
      ModelConfig mc = model_config_from(cfg_json);
      TrainConfig tc = effective_train(cfg_json);
      AugmentSettings as = effective_augment(cfg_json);
      apply_ablations(ablate, mc, tc);

      Corpus verbal = load_corpus(verbal_path);
      Corpus nominal = load_corpus(nominal_path);
      std::optional<Corpus> dev;
      if (!dev_path.empty()) dev = load_corpus(dev_path);

      std::optional<Corpus> augmentation;
      if (!pool_path.empty() && tc.use_augmentation && as.cfg.n_per_pred > 0) {
        Corpus pool = load_corpus(pool_path);
        AugmentStats stats;
        augmentation = build_augmentation(verbal, nominal, pool, mc, tc, as,
                                          seed, &stats);
        std::cout << "augmentation: " << stats.instances << " instances for "
                  << (stats.predicates - stats.missing) << "/"
                  << stats.predicates << " predicates\n";
        save_corpus(*augmentation,
                    (fs::path(dir) / "augmentation.jsonl").string());
      }

      std::vector<const Corpus*> vocab_sources = {&verbal, &nominal};
      if (augmentation) vocab_sources.push_back(&*augmentation);
      if (dev) vocab_sources.push_back(&*dev);
      Model model(build_vocabs(vocab_sources, verbal.roles), mc, seed);

      Trainer trainer(model, tc);
      TrainResult result = trainer.run(
          verbal, nominal, augmentation ? &*augmentation : nullptr,
          dev ? &*dev : nullptr,
          (fs::path(dir) / "train_log.jsonl").string());

      save_model_bundle(dir, model, seed);
      trainer.save_checkpoint((fs::path(dir) / "checkpoint").string());
      write_json_file((fs::path(dir) / "result.json").string(),
                      train_result_json(result));
      write_manifest(dir, "train", seed, settings_echo(cfg_json));

      if (result.diverged) {
        std::cerr << "training diverged; best parameters restored\n";
        return kExitDiverged;
      }
      std::cout << "trained " << result.epochs_run << " epochs ("
                << result.steps_run << " steps), best dev accuracy "
                << (result.best_dev_accuracy < 0
                        ? std::string("n/a")
                        : format_percent(result.best_dev_accuracy))
                << " -> " << dir << "\n";
      return 0;
    });
  }

  if (label->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("label");
      ModelBundle b = load_model_bundle(model_dir);
      Model model(b.vocabs, b.cfg, b.seed);
      model.store().load(
          (fs::path(model_dir) / "checkpoint" / "params.bin").string());
      Corpus input = load_corpus(input_path);
      auto records = label_corpus(model, input);
      save_predictions((fs::path(dir) / "predictions.jsonl").string(),
                       records);
      write_manifest(dir, "label", b.seed,
                     settings_echo(json{{"model_dir", model_dir}}));
      std::cout << "labeled " << records.size() << " instances -> " << dir
                << "\n";
      return 0;
    });
  }

  if (baseline->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("baseline-" + system);
      json cfg_json = load_config(config_path);
      Corpus input = load_corpus(input_path);
      std::vector<PredictionRecord> records;
      json extra = {{"system", system}};

      auto need_train = [&]() -> Corpus {
        if (train_path.empty())
          throw ConfigError("--train is required for " + system);
        return load_corpus(train_path);
      };

      if (system == "most-frequent") {
        Corpus train_corpus = need_train();
        MostFrequent mf;
        mf.fit(train_corpus);
        size_t unseen = 0;
        records = mf.label(input, &unseen);
        extra["unseen_predicate_arguments"] = unseen;
      } else if (system == "factorization") {
        Corpus train_corpus = need_train();
        FactorizationConfig fc = factorization_config_from(cfg_json);
        Factorization f(train_corpus, fc, seed);
        auto nll = f.fit(train_corpus);
        records = f.label(input);
        extra["epoch_nll"] = nll;
      } else if (system == "direct-transfer") {
        Corpus train_corpus = need_train();
        ModelConfig mc = model_config_from(cfg_json);
        TrainConfig tc = effective_train(cfg_json);
        apply_ablations(ablate, mc, tc);
        tc.discriminative_only = true;
        std::optional<Corpus> dev;
        if (!dev_path.empty()) dev = load_corpus(dev_path);
        std::vector<const Corpus*> sources = {&train_corpus, &input};
        if (dev) sources.push_back(&*dev);
        Model model(build_vocabs(sources, train_corpus.roles), mc, seed);
        auto outcome =
            run_training(model, train_corpus, input, nullptr,
                         dev ? &*dev : nullptr, nullptr, tc, "");
        if (outcome.result.diverged) {
          std::cerr << "direct-transfer training diverged\n";
          return kExitDiverged;
        }
        records = label_corpus(model, input);
        extra["train"] = train_result_json(outcome.result);
      } else if (system == "all-a0") {
        records = all_a0_labels(input);
      } else if (system == "syntfun") {
        records = syntactic_function_labels(input);
      } else {  // arg2vec
        if (embeddings_path.empty())
          throw ConfigError("--embeddings is required for arg2vec");
        auto table = load_embeddings(embeddings_path);
        auto res = arg2vec_labels(input, table, arg2vec_k);
        records = std::move(res.records);
        extra["missing_lemmas"] = res.missing;
        extra["clusters"] = arg2vec_k;
      }

      save_predictions((fs::path(dir) / "predictions.jsonl").string(),
                       records);
      json echo = settings_echo(cfg_json);
      echo["baseline"] = extra;
      write_manifest(dir, "baseline", seed, echo);
      std::cout << system << " labeled " << records.size()
                << " instances -> " << dir << "\n";
      return 0;
    });
  }

  if (eval->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("eval");
      auto records = load_predictions(predictions_path);
      ScoreOptions opts;
      opts.drop_self_loops = drop_self_loops;
      opts.macro_all = macro;
      std::string text;
      json report;
      if (clustering) {
        auto s = clustering_from_records(records, opts);
        text = clustering_report_text(s);
        report = {{"purity", s.purity},
                  {"collocation", s.collocation},
                  {"f1", s.f1}};
      } else {
        auto s = supervised_scores(records, opts);
        text = supervised_report_text(s, macro);
        json roles;
        for (const auto& [role, score] : s.per_role)
          roles[role] = role_score_json(score);
        report = {{"per_role", roles},
                  {"adjuncts", role_score_json(s.adjuncts)},
                  {"accuracy", s.accuracy},
                  {"all_f1", s.all_f1},
                  {"arguments", s.arguments},
                  {"macro", macro},
                  {"drop_self_loops", drop_self_loops}};
      }
      write_json_file((fs::path(dir) / "report.json").string(), report);
      std::ofstream txt((fs::path(dir) / "report.txt").string());
      txt << text;
      std::cout << text;
      write_manifest(dir, "eval", seed,
                     settings_echo(json{{"predictions", predictions_path},
                                        {"clustering", clustering}}));
      return 0;
    });
  }

  if (analyze->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("analyze-bc");
      Corpus v = load_corpus(verbal_path);
      Corpus n = load_corpus(nominal_path);
      BCConfig bc;
      bc.min_pair_count = min_pair;
      bc.min_argument_count = min_arg;
      auto entries = bc_report(v, n, bc);

      json rows = json::array();
      std::ostringstream text;
      // BC = sum over lemmas of sqrt(verbal share * nominal share);
      // delta = BC(original) - BC(lemma removed, renormalized)
      text << "predicate  role     BC      verbal  nominal  top contributions\n";
      for (const auto& e : entries) {
        json contribs = json::array();
        std::ostringstream top;
        size_t listed = 0;
        for (const auto& c : e.contributions) {
          contribs.push_back({{"lemma", c.lemma},
                              {"delta", c.delta},
                              {"defined", c.defined}});
          if (listed < top_contrib) {
            if (listed) top << " ";
            top << c.lemma << ":";
            if (c.defined) {
              char buf[32];
              std::snprintf(buf, sizeof(buf), "%+.4f", c.delta);
              top << buf;
            } else {
              top << "undefined";
            }
            ++listed;
          }
        }
        rows.push_back({{"predicate", e.predicate},
                        {"role", e.role},
                        {"bc", e.bc},
                        {"verbal_count", e.verbal_count},
                        {"nominal_count", e.nominal_count},
                        {"contributions", contribs}});
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%-10s %-6s %7.4f %7zu %8zu  ",
                      e.predicate.c_str(), e.role.c_str(), e.bc,
                      e.verbal_count, e.nominal_count);
        text << buf << top.str() << "\n";
      }
      write_json_file((fs::path(dir) / "bc.json").string(), rows);
      std::ofstream txt((fs::path(dir) / "bc.txt").string());
      txt << text.str();
      std::cout << text.str();
      write_manifest(dir, "analyze-bc", seed,
                     settings_echo(json{{"min_pair", min_pair},
                                        {"min_arg", min_arg}}));
      return 0;
    });
  }

  if (identify->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("identify-args");
      Corpus input = load_corpus(input_path);
      std::ofstream out((fs::path(dir) / "identified.jsonl").string());
      size_t tp = 0, fp = 0, fn = 0;
      bool any_gold = false;
      for (size_t si = 0; si < input.sentences.size(); ++si) {
        const auto& sentence = input.sentences[si];
        for (size_t pi = 0; pi < sentence.predicates.size(); ++pi) {
          const auto& inst = sentence.predicates[pi];
          auto found = identify_arguments(sentence, inst.token_index);
          std::set<int> gold;
          for (const auto& a : inst.arguments) gold.insert(a.token_index);
          if (!inst.arguments.empty()) any_gold = true;
          for (int t : found) {
            if (gold.count(t)) ++tp; else ++fp;
          }
          for (int t : gold) {
            if (!found.count(t)) ++fn;
          }
          json line = {{"sentence", si},
                       {"predicate", pi},
                       {"lemma", inst.lemma},
                       {"identified", std::vector<int>(found.begin(),
                                                       found.end())},
                       {"annotated", std::vector<int>(gold.begin(),
                                                      gold.end())}};
          out << line.dump() << "\n";
        }
      }
      json summary = {{"true_positives", tp},
                      {"false_positives", fp},
                      {"false_negatives", fn}};
      if (any_gold) {
        double p = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
        double r = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
        double f1 = p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
        summary["precision"] = p;
        summary["recall"] = r;
        summary["f1"] = f1;
        std::cout << "identification P " << format_percent(p) << " R "
                  << format_percent(r) << " F1 " << format_percent(f1)
                  << "\n";
      }
      write_json_file((fs::path(dir) / "summary.json").string(), summary);
      write_manifest(dir, "identify-args", seed,
                     settings_echo(json{{"input", input_path}}));
      return 0;
    });
  }

  if (sweep->parsed()) {
    return dispatch([&] {
      std::string dir = resolve_out("sweep-augment");
      json cfg_json = load_config(config_path);
      ModelConfig mc = model_config_from(cfg_json);
      TrainConfig tc = effective_train(cfg_json);
      AugmentSettings as = effective_augment(cfg_json);
      apply_ablations(ablate, mc, tc);

      Corpus verbal = load_corpus(verbal_path);
      Corpus nominal = load_corpus(nominal_path);
      Corpus pool = load_corpus(pool_path);
      std::optional<Corpus> dev, eval_corpus;
      if (!dev_path.empty()) dev = load_corpus(dev_path);
      if (!eval_path.empty()) eval_corpus = load_corpus(eval_path);

      std::ofstream rowsf((fs::path(dir) / "sweep.jsonl").string());
      std::ostringstream curve;
      curve << "# n_augment  dev_accuracy  eval_accuracy\n";
      for (size_t size : sweep_sizes) {
        AugmentSettings sized = as;
        sized.cfg.n_per_pred = size;
        std::optional<Corpus> augmentation;
        if (size > 0 && tc.use_augmentation) {
          augmentation = build_augmentation(verbal, nominal, pool, mc, tc,
                                            sized, seed, nullptr);
        }
        std::vector<const Corpus*> sources = {&verbal, &nominal, &pool};
        if (dev) sources.push_back(&*dev);
        Model model(build_vocabs(sources, verbal.roles), mc, seed);
        auto outcome = run_training(
            model, verbal, nominal, augmentation ? &*augmentation : nullptr,
            dev ? &*dev : nullptr, eval_corpus ? &*eval_corpus : nullptr, tc,
            "");
        if (outcome.result.diverged) {
          std::cerr << "training diverged at n_augment=" << size << "\n";
          return kExitDiverged;
        }
        json row = {{"n_augment", size},
                    {"dev_accuracy", outcome.result.best_dev_accuracy},
                    {"eval_accuracy", outcome.nominal_accuracy},
                    {"epochs_run", outcome.result.epochs_run}};
        rowsf << row.dump() << "\n";
        curve << size << "  " << outcome.result.best_dev_accuracy << "  "
              << outcome.nominal_accuracy << "\n";
        std::cout << "n_augment=" << size << " dev="
                  << outcome.result.best_dev_accuracy
                  << " eval=" << outcome.nominal_accuracy << "\n";
      }
      std::ofstream txt((fs::path(dir) / "sweep.txt").string());
      txt << curve.str();
      write_manifest(dir, "sweep-augment", seed, settings_echo(cfg_json));
      return 0;
    });
  }

  return kExitGeneric;
}
