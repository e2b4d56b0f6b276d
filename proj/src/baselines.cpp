#include "srlx/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "srlx/nn/graph.hpp"
#include "srlx/optimizer.hpp"

namespace srlx {

namespace {

// record per instance with ids matching label_corpus, predictions left blank
std::vector<PredictionRecord> skeleton(const Corpus& corpus) {
  std::vector<PredictionRecord> out;
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    const auto& sentence = corpus.sentences[si];
    for (size_t pi = 0; pi < sentence.predicates.size(); ++pi) {
      const auto& inst = sentence.predicates[pi];
      PredictionRecord r;
      r.instance = "s" + std::to_string(si) + ".p" + std::to_string(pi);
      r.predicted.resize(inst.arguments.size());
      for (const auto& arg : inst.arguments) {
        r.gold.push_back(arg.gold_role);
        r.self_loop.push_back(arg.token_index == inst.token_index ? 1 : 0);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

size_t argmax_counts(const std::vector<int64_t>& counts) {
  size_t best = 0;
  for (size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return best;
}

}  // namespace

void MostFrequent::fit(const Corpus& verbal) {
  roles_ = verbal.roles;
  by_pair_.clear();
  by_pred_.clear();
  global_.assign(roles_.size(), 0);
  size_t seen = 0;
  for (const auto& sentence : verbal.sentences) {
    for (const auto& inst : sentence.predicates) {
      for (const auto& arg : inst.arguments) {
        if (!arg.gold_role) continue;
        size_t rid = roles_.id(*arg.gold_role);
        auto& pair = by_pair_[{inst.lemma, arg.lemma}];
        if (pair.empty()) pair.assign(roles_.size(), 0);
        auto& pred = by_pred_[inst.lemma];
        if (pred.empty()) pred.assign(roles_.size(), 0);
        ++pair[rid];
        ++pred[rid];
        ++global_[rid];
        ++seen;
      }
    }
  }
  if (seen == 0) throw DataError("most-frequent fit needs gold roles");
  fitted_ = true;
}

const std::vector<int64_t>* MostFrequent::pair_counts(
    const std::string& predicate, const std::string& argument) const {
  auto it = by_pair_.find({predicate, argument});
  return it == by_pair_.end() ? nullptr : &it->second;
}

MostFrequent::Prediction MostFrequent::predict(
    const std::string& predicate, const std::string& argument) const {
  if (!fitted_) throw ConfigError("most-frequent queried before fit");
  if (const auto* counts = pair_counts(predicate, argument)) {
    return {roles_.label(argmax_counts(*counts)), false};
  }
  auto it = by_pred_.find(predicate);
  if (it != by_pred_.end()) {
    return {roles_.label(argmax_counts(it->second)), false};
  }
  return {roles_.label(argmax_counts(global_)), true};
}

std::vector<PredictionRecord> MostFrequent::label(const Corpus& corpus,
                                                  size_t* unseen) const {
  auto records = skeleton(corpus);
  size_t fallbacks = 0;
  size_t idx = 0;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& inst : sentence.predicates) {
      auto& r = records[idx++];
      for (size_t a = 0; a < inst.arguments.size(); ++a) {
        auto p = predict(inst.lemma, inst.arguments[a].lemma);
        r.predicted[a] = p.role;
        if (p.unseen_predicate) ++fallbacks;
      }
    }
  }
  if (unseen) *unseen = fallbacks;
  return records;
}

Factorization::Factorization(const Corpus& verbal,
                             const FactorizationConfig& cfg, uint64_t seed)
    : cfg_(cfg), roles_(verbal.roles), seed_(seed) {
  if (cfg.dim <= 0) throw ConfigError("factorization dim must be positive");
  if (cfg.batch == 0) throw ConfigError("factorization batch must be positive");
  for (const auto& sentence : verbal.sentences) {
    for (const auto& inst : sentence.predicates) {
      preds_.add(inst.lemma, 0);
      for (const auto& arg : inst.arguments) args_.add(arg.lemma, 0);
    }
  }
  Rng rng = Rng::derive(seed, {0xFAC0});
  arg_emb_ = store_.create("fac.arg_emb", static_cast<int>(args_.size()),
                           cfg_.dim);
  pred_emb_ = store_.create("fac.pred_emb", static_cast<int>(preds_.size()),
                            cfg_.dim);
  nn::init_embedding(*arg_emb_, rng);
  nn::init_embedding(*pred_emb_, rng);
  for (const auto& label : roles_.labels()) {
    nn::Tensor* w = store_.create("fac.W." + label, cfg_.dim, cfg_.dim);
    nn::init_affine(*w, rng);
    role_w_.push_back(w);
    // role offset vectors start at zero like biases
    role_b_.push_back(store_.create("fac.w." + label, cfg_.dim, 1));
  }
}

double Factorization::triple_loss(int pred_id, int arg_id, size_t role_id,
                                  bool backward) {
  nn::Graph g;
  auto vp = g.row(g.param(pred_emb_), pred_id);
  auto u = g.add(g.matvec(g.param(role_w_[role_id]), vp),
                 g.param(role_b_[role_id]));
  auto scores = g.matvec(g.param(arg_emb_), u);
  auto loss = g.scale(g.pick(g.log_softmax(scores), arg_id), -1.0);
  if (backward) g.backward(loss);
  return g.value(loss)(0, 0);
}

std::vector<double> Factorization::fit(const Corpus& verbal) {
  struct Triple {
    int pred, arg;
    size_t role;
  };
  std::vector<Triple> triples;
  for (const auto& sentence : verbal.sentences) {
    for (const auto& inst : sentence.predicates) {
      for (const auto& arg : inst.arguments) {
        if (!arg.gold_role) continue;
        triples.push_back({preds_.id_or_unk(inst.lemma),
                           args_.id_or_unk(arg.lemma),
                           roles_.id(*arg.gold_role)});
      }
    }
  }
  if (triples.empty()) throw DataError("factorization fit needs gold roles");

  Adadelta opt(store_, cfg_.lr, cfg_.rho, cfg_.eps, cfg_.clip_norm);
  std::vector<double> epoch_nll;
  for (size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
    Rng shuffler = Rng::derive(seed_, {0xFAC7, epoch});
    shuffler.shuffle(triples);
    double total = 0.0;
    for (size_t start = 0; start < triples.size(); start += cfg_.batch) {
      size_t stop = std::min(start + cfg_.batch, triples.size());
      nn::Graph g;
      std::vector<nn::Graph::V> terms;
      for (size_t i = start; i < stop; ++i) {
        const auto& t = triples[i];
        auto vp = g.row(g.param(pred_emb_), t.pred);
        auto u = g.add(g.matvec(g.param(role_w_[t.role]), vp),
                       g.param(role_b_[t.role]));
        auto scores = g.matvec(g.param(arg_emb_), u);
        terms.push_back(g.scale(g.pick(g.log_softmax(scores), t.arg), -1.0));
      }
      auto batch_loss =
          g.scale(g.add_n(terms), 1.0 / static_cast<double>(terms.size()));
      total += g.value(batch_loss)(0, 0) * static_cast<double>(terms.size());
      g.backward(batch_loss);
      opt.step();
    }
    epoch_nll.push_back(total / static_cast<double>(triples.size()));
  }
  return epoch_nll;
}

Eigen::VectorXd Factorization::role_transform(int pred_id,
                                              size_t role_id) const {
  Eigen::VectorXd vp = pred_emb_->value.row(pred_id).transpose();
  return role_w_[role_id]->value * vp + role_b_[role_id]->value.col(0);
}

double Factorization::score(const std::string& predicate,
                            const std::string& argument,
                            size_t role_id) const {
  if (role_id >= roles_.size()) throw DataError("role id out of range");
  Eigen::VectorXd va =
      arg_emb_->value.row(args_.id_or_unk(argument)).transpose();
  return va.dot(role_transform(preds_.id_or_unk(predicate), role_id));
}

std::string Factorization::predict(const std::string& predicate,
                                   const std::string& argument) const {
  Eigen::VectorXd va =
      arg_emb_->value.row(args_.id_or_unk(argument)).transpose();
  int pred_id = preds_.id_or_unk(predicate);
  size_t best = 0;
  double best_score = va.dot(role_transform(pred_id, 0));
  for (size_t y = 1; y < roles_.size(); ++y) {
    double s = va.dot(role_transform(pred_id, y));
    if (s > best_score) {
      best_score = s;
      best = y;
    }
  }
  return roles_.label(best);
}

std::vector<PredictionRecord> Factorization::label(
    const Corpus& corpus) const {
  auto records = skeleton(corpus);
  size_t idx = 0;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& inst : sentence.predicates) {
      auto& r = records[idx++];
      for (size_t a = 0; a < inst.arguments.size(); ++a) {
        r.predicted[a] = predict(inst.lemma, inst.arguments[a].lemma);
      }
    }
  }
  return records;
}

std::vector<PredictionRecord> all_a0_labels(const Corpus& corpus) {
  auto records = skeleton(corpus);
  for (auto& r : records) {
    std::fill(r.predicted.begin(), r.predicted.end(), "A0");
  }
  return records;
}

std::vector<PredictionRecord> syntactic_function_labels(const Corpus& corpus) {
  auto records = skeleton(corpus);
  size_t idx = 0;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& inst : sentence.predicates) {
      auto& r = records[idx++];
      for (size_t a = 0; a < inst.arguments.size(); ++a) {
        int ti = inst.arguments[a].token_index;
        if (ti < 0 || static_cast<size_t>(ti) >= sentence.tokens.size())
          throw DataError("argument token index out of range");
        r.predicted[a] = sentence.tokens[ti].deprel;
      }
    }
  }
  return records;
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding file: " + path);
  EmbeddingTable table;
  std::string line;
  size_t lineno = 0;
  long dim = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (!ss.eof())
      throw ParseError("bad embedding value at line " + std::to_string(lineno));
    // word2vec text header: two integers, no word
    if (lineno == 1 && values.size() == 1) {
      char* end = nullptr;
      std::strtol(word.c_str(), &end, 10);
      if (end && *end == '\0') continue;
    }
    if (values.empty())
      throw ParseError("embedding row without values at line " +
                       std::to_string(lineno));
    if (dim < 0) dim = static_cast<long>(values.size());
    if (static_cast<long>(values.size()) != dim)
      throw ParseError("embedding dimension mismatch at line " +
                       std::to_string(lineno));
    table[word] = Eigen::Map<Eigen::VectorXd>(values.data(),
                                              static_cast<long>(values.size()));
  }
  return table;
}

namespace {

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw DataError("embedding dimensions disagree");
  double na = std::max(a.norm(), 1e-12);
  double nb = std::max(b.norm(), 1e-12);
  return 1.0 - a.dot(b) / (na * nb);
}

// naive average-linkage agglomeration, O(n^3); lemma lists stay small.
// returns cluster index per input position
std::vector<size_t> agglomerate(const std::vector<Eigen::VectorXd>& points,
                                size_t k) {
  size_t n = points.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] = cosine_distance(points[i], points[j]);

  std::vector<bool> active(n, true);
  std::vector<size_t> sizes(n, 1);
  std::vector<size_t> assign(n);
  std::vector<std::vector<size_t>> members(n);
  for (size_t i = 0; i < n; ++i) {
    assign[i] = i;
    members[i] = {i};
  }
  size_t clusters = n;
  while (clusters > k) {
    size_t bi = n, bj = n;
    double best = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (bi == n || dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    // average linkage via the Lance-Williams update
    for (size_t l = 0; l < n; ++l) {
      if (!active[l] || l == bi || l == bj) continue;
      double d = (static_cast<double>(sizes[bi]) * dist[bi][l] +
                  static_cast<double>(sizes[bj]) * dist[bj][l]) /
                 static_cast<double>(sizes[bi] + sizes[bj]);
      dist[bi][l] = dist[l][bi] = d;
    }
    sizes[bi] += sizes[bj];
    active[bj] = false;
    members[bi].insert(members[bi].end(), members[bj].begin(),
                       members[bj].end());
    --clusters;
  }
  for (size_t c = 0; c < n; ++c) {
    if (!active[c]) continue;
    for (size_t m : members[c]) assign[m] = c;
  }
  return assign;
}

}  // namespace

Arg2vecResult arg2vec_labels(const Corpus& corpus,
                             const EmbeddingTable& embeddings, size_t k) {
  if (k == 0) throw ConfigError("arg2vec needs at least one cluster");
  std::set<std::string> lemma_set;
  for (const auto& sentence : corpus.sentences)
    for (const auto& inst : sentence.predicates)
      for (const auto& arg : inst.arguments) lemma_set.insert(arg.lemma);

  Arg2vecResult result;
  std::vector<std::string> known;
  std::vector<Eigen::VectorXd> points;
  for (const auto& lemma : lemma_set) {
    auto it = embeddings.find(lemma);
    if (it == embeddings.end()) {
      result.lemma_cluster[lemma] = "oov:" + lemma;
      ++result.missing;
    } else {
      known.push_back(lemma);
      points.push_back(it->second);
    }
  }

  if (!known.empty()) {
    auto assign = agglomerate(points, std::min(k, known.size()));
    // name clusters in order of their first member lemma (sorted input)
    std::map<size_t, std::string> names;
    size_t next = 0;
    for (size_t i = 0; i < known.size(); ++i) {
      auto [it, inserted] = names.emplace(assign[i], "");
      if (inserted) it->second = "k" + std::to_string(next++);
      result.lemma_cluster[known[i]] = it->second;
    }
  }

  result.records = skeleton(corpus);
  size_t idx = 0;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& inst : sentence.predicates) {
      auto& r = result.records[idx++];
      for (size_t a = 0; a < inst.arguments.size(); ++a) {
        r.predicted[a] = result.lemma_cluster.at(inst.arguments[a].lemma);
      }
    }
  }
  return result;
}

}  // namespace srlx
