#include "srlx/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

namespace srlx {

using nlohmann::json;

void save_predictions(const std::string& path,
                      const std::vector<PredictionRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write predictions: " + path);
  for (const auto& r : records) {
    json gold = json::array();
    for (const auto& g : r.gold) {
      if (g) {
        gold.push_back(*g);
      } else {
        gold.push_back(nullptr);
      }
    }
    json line = {{"instance", r.instance},
                 {"predicted", r.predicted},
                 {"gold", gold},
                 {"self_loop", r.self_loop}};
    out << line.dump() << "\n";
  }
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read predictions: " + path);
  std::vector<PredictionRecord> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("predictions line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    PredictionRecord r;
    r.instance = j.at("instance").get<std::string>();
    r.predicted = j.at("predicted").get<std::vector<std::string>>();
    for (const auto& g : j.at("gold")) {
      if (g.is_null()) {
        r.gold.emplace_back(std::nullopt);
      } else {
        r.gold.emplace_back(g.get<std::string>());
      }
    }
    r.self_loop = j.at("self_loop").get<std::vector<uint8_t>>();
    if (r.gold.size() != r.predicted.size() ||
        r.self_loop.size() != r.predicted.size()) {
      throw DataError("predictions line " + std::to_string(lineno) +
                      ": per-argument lists disagree in length");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PredictionRecord> label_corpus(const Model& model,
                                           const Corpus& corpus) {
  std::vector<PredictionRecord> out;
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    const auto& sent = corpus.sentences[si];
    for (size_t pi = 0; pi < sent.predicates.size(); ++pi) {
      const auto& inst = sent.predicates[pi];
      if (inst.arguments.empty()) continue;
      PredictionRecord r;
      r.instance = "s" + std::to_string(si) + ".p" + std::to_string(pi);
      r.predicted = model.predict_roles(sent, inst);
      for (const auto& a : inst.arguments) {
        r.gold.push_back(a.gold_role);
        r.self_loop.push_back(a.token_index == inst.token_index ? 1 : 0);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

namespace {

// flattened (predicted, gold) pairs that carry gold labels
std::vector<std::pair<std::string, std::string>> scored_pairs(
    const std::vector<PredictionRecord>& records, bool drop_self_loops) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& r : records) {
    if (r.predicted.size() != r.gold.size() ||
        r.predicted.size() != r.self_loop.size()) {
      throw DataError("prediction record " + r.instance +
                      " has inconsistent argument lists");
    }
    for (size_t i = 0; i < r.predicted.size(); ++i) {
      if (!r.gold[i]) continue;
      if (drop_self_loops && r.self_loop[i]) continue;
      pairs.emplace_back(r.predicted[i], *r.gold[i]);
    }
  }
  return pairs;
}

bool is_adjunct(const std::string& role) { return role.rfind("AM-", 0) == 0; }

}  // namespace

SupervisedScores supervised_scores(const std::vector<PredictionRecord>& records,
                                   const ScoreOptions& opts) {
  auto pairs = scored_pairs(records, opts.drop_self_loops);
  SupervisedScores s;
  s.arguments = pairs.size();
  size_t correct = 0;
  for (const auto& [pred, gold] : pairs) {
    s.per_role[gold].gold_count++;
    s.per_role[pred].predicted_count++;
    if (pred == gold) {
      s.per_role[gold].correct++;
      ++correct;
    }
  }
  for (const auto& [role, rs] : s.per_role) {
    if (!is_adjunct(role)) continue;
    s.adjuncts.gold_count += rs.gold_count;
    s.adjuncts.predicted_count += rs.predicted_count;
    s.adjuncts.correct += rs.correct;
  }
  s.accuracy = pairs.empty() ? 0.0 : static_cast<double>(correct) / pairs.size();
  if (opts.macro_all) {
    double sum = 0.0;
    size_t n = 0;
    for (const auto& [role, rs] : s.per_role) {
      if (rs.gold_count == 0) continue;  // never-gold roles are not classes
      sum += rs.f1();
      ++n;
    }
    s.all_f1 = n == 0 ? 0.0 : sum / static_cast<double>(n);
  } else {
    // micro over single-label arguments: precision = recall = accuracy
    s.all_f1 = s.accuracy;
  }
  return s;
}

ClusteringScores clustering_scores(const std::vector<std::string>& clusters,
                                   const std::vector<std::string>& gold) {
  if (clusters.empty() || clusters.size() != gold.size()) {
    throw DataError("clustering evaluation needs matched non-empty lists");
  }
  std::map<std::string, std::map<std::string, size_t>> by_cluster, by_gold;
  for (size_t i = 0; i < clusters.size(); ++i) {
    by_cluster[clusters[i]][gold[i]]++;
    by_gold[gold[i]][clusters[i]]++;
  }
  double n = static_cast<double>(clusters.size());
  double pu = 0.0, co = 0.0;
  for (const auto& [c, counts] : by_cluster) {
    size_t best = 0;
    for (const auto& [g, k] : counts) best = std::max(best, k);
    pu += static_cast<double>(best);
  }
  for (const auto& [g, counts] : by_gold) {
    size_t best = 0;
    for (const auto& [c, k] : counts) best = std::max(best, k);
    co += static_cast<double>(best);
  }
  ClusteringScores out;
  out.purity = pu / n;
  out.collocation = co / n;
  out.f1 = out.purity + out.collocation == 0.0
               ? 0.0
               : 2.0 * out.purity * out.collocation /
                     (out.purity + out.collocation);
  return out;
}

ClusteringScores clustering_from_records(
    const std::vector<PredictionRecord>& records, const ScoreOptions& opts) {
  auto pairs = scored_pairs(records, opts.drop_self_loops);
  std::vector<std::string> clusters, gold;
  clusters.reserve(pairs.size());
  gold.reserve(pairs.size());
  for (auto& [c, g] : pairs) {
    clusters.push_back(c);
    gold.push_back(g);
  }
  return clustering_scores(clusters, gold);
}

double bhattacharyya(const LemmaCounts& a, const LemmaCounts& b) {
  size_t na = 0, nb = 0;
  for (const auto& [k, v] : a) na += v;
  for (const auto& [k, v] : b) nb += v;
  if (na == 0 || nb == 0) throw DataError("empty sample in overlap computation");
  double bc = 0.0;
  for (const auto& [lemma, ca] : a) {
    auto it = b.find(lemma);
    if (it == b.end()) continue;
    double p = static_cast<double>(ca) / static_cast<double>(na);
    double q = static_cast<double>(it->second) / static_cast<double>(nb);
    bc += std::sqrt(p * q);
  }
  return std::min(bc, 1.0);
}

std::optional<double> argument_contribution(const LemmaCounts& a,
                                            const LemmaCounts& b,
                                            const std::string& lemma) {
  if (a.count(lemma) == 0 && b.count(lemma) == 0) return 0.0;
  LemmaCounts a2 = a, b2 = b;
  a2.erase(lemma);
  b2.erase(lemma);
  if (a2.empty() || b2.empty()) return std::nullopt;
  return bhattacharyya(a, b) - bhattacharyya(a2, b2);
}

namespace {

// lemma samples per (predicate, role)
std::map<std::pair<std::string, std::string>, LemmaCounts> collect_samples(
    const Corpus& corpus) {
  std::map<std::pair<std::string, std::string>, LemmaCounts> out;
  for (const auto& sent : corpus.sentences) {
    for (const auto& inst : sent.predicates) {
      for (const auto& arg : inst.arguments) {
        if (!arg.gold_role) continue;
        out[{inst.lemma, *arg.gold_role}][arg.lemma]++;
      }
    }
  }
  return out;
}

size_t total(const LemmaCounts& c) {
  size_t n = 0;
  for (const auto& [k, v] : c) n += v;
  return n;
}

}  // namespace

std::vector<BCEntry> bc_report(const Corpus& verbal, const Corpus& nominal,
                               const BCConfig& cfg) {
  auto sv = collect_samples(verbal);
  auto sn = collect_samples(nominal);
  std::vector<BCEntry> out;
  for (const auto& [key, va] : sv) {
    auto it = sn.find(key);
    if (it == sn.end()) continue;
    const LemmaCounts& na = it->second;
    size_t cv = total(va), cn = total(na);
    if (cv < cfg.min_pair_count || cn < cfg.min_pair_count) continue;

    BCEntry e;
    e.predicate = key.first;
    e.role = key.second;
    e.bc = bhattacharyya(va, na);
    e.verbal_count = cv;
    e.nominal_count = cn;

    std::set<std::string> lemmas;
    for (const auto& [l, c] : va) {
      if (c + (na.count(l) ? na.at(l) : 0) >= cfg.min_argument_count)
        lemmas.insert(l);
    }
    for (const auto& [l, c] : na) {
      if (c + (va.count(l) ? va.at(l) : 0) >= cfg.min_argument_count)
        lemmas.insert(l);
    }
    for (const auto& lemma : lemmas) {
      auto delta = argument_contribution(va, na, lemma);
      BCContribution c;
      c.lemma = lemma;
      c.defined = delta.has_value();
      c.delta = delta.value_or(0.0);
      e.contributions.push_back(std::move(c));
    }
    std::sort(e.contributions.begin(), e.contributions.end(),
              [](const BCContribution& x, const BCContribution& y) {
                if (x.defined != y.defined) return x.defined > y.defined;
                if (x.delta != y.delta) return x.delta > y.delta;
                return x.lemma < y.lemma;
              });
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace srlx
