#include "srlx/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace srlx {

const std::string& domain_name(Domain d) {
  static const std::string v = "verbal", n = "nominal";
  return d == Domain::Verbal ? v : n;
}

Domain domain_from_name(const std::string& s) {
  if (s == "verbal") return Domain::Verbal;
  if (s == "nominal") return Domain::Nominal;
  throw DataError("unknown domain name: " + s);
}

Vocab::Vocab(std::vector<std::string> reserved) {
  for (auto& r : reserved) {
    index_.emplace(r, static_cast<int>(names_.size()));
    names_.push_back(std::move(r));
    counts_.push_back(0);
  }
}

int Vocab::add(const std::string& s, int64_t count) {
  auto it = index_.find(s);
  if (it != index_.end()) {
    counts_[it->second] += count;
    return it->second;
  }
  int id = static_cast<int>(names_.size());
  index_.emplace(s, id);
  names_.push_back(s);
  counts_.push_back(count);
  return id;
}

int Vocab::id(const std::string& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) throw DataError("lemma not in vocabulary: " + s);
  return it->second;
}

int Vocab::id_or_unk(const std::string& s) const {
  auto it = index_.find(s);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::name(int id) const {
  if (id < 0 || static_cast<size_t>(id) >= names_.size())
    throw DataError("vocab id out of range: " + std::to_string(id));
  return names_[id];
}

int64_t Vocab::count(int id) const {
  if (id < 0 || static_cast<size_t>(id) >= counts_.size())
    throw DataError("vocab id out of range: " + std::to_string(id));
  return counts_[id];
}

RoleInventory::RoleInventory(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw ConfigError("empty role label");
    if (!index_.emplace(labels_[i], i).second)
      throw ConfigError("duplicate role label: " + labels_[i]);
  }
}

RoleInventory RoleInventory::standard() {
  return RoleInventory({"A0", "A1", "A2", "A3", "A4", "A5", "AM-ADV", "AM-CAU",
                        "AM-DIR", "AM-EXT", "AM-LOC", "AM-MNR", "AM-NEG",
                        "AM-PRD", "AM-TMP"});
}

RoleInventory RoleInventory::prefix(size_t k) {
  RoleInventory full = standard();
  if (k == 0 || k > full.size())
    throw ConfigError("role prefix size out of range: " + std::to_string(k));
  return RoleInventory(std::vector<std::string>(full.labels_.begin(),
                                                full.labels_.begin() + k));
}

const std::string& RoleInventory::label(size_t id) const {
  if (id >= labels_.size())
    throw DataError("role id out of range: " + std::to_string(id));
  return labels_[id];
}

std::optional<size_t> RoleInventory::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t RoleInventory::id(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw DataError("role not in inventory: " + label);
  return it->second;
}

bool RoleInventory::contains(const std::string& label) const {
  return index_.count(label) > 0;
}

size_t Corpus::instance_count() const {
  size_t n = 0;
  for (const auto& s : sentences) n += s.predicates.size();
  return n;
}

size_t Corpus::slot_count() const {
  size_t n = 0;
  for (const auto& s : sentences)
    for (const auto& p : s.predicates) n += p.arguments.size();
  return n;
}

void Corpus::rebuild_lemma_vocab() {
  Vocab fresh;
  for (const auto& s : sentences)
    for (const auto& p : s.predicates)
      for (const auto& a : p.arguments) fresh.add(a.lemma);
  lemma_vocab = std::move(fresh);
}

void check_tree(const AnnotatedSentence& sentence) {
  const int n = static_cast<int>(sentence.tokens.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const auto& h = sentence.tokens[i].head;
    if (!h.has_value()) {
      ++roots;
      continue;
    }
    if (*h < 0 || *h >= n)
      throw StructuralError("head index out of range at token " +
                            std::to_string(i));
    if (*h == i)
      throw StructuralError("token is its own head at " + std::to_string(i));
  }
  if (n > 0 && roots != 1)
    throw StructuralError("dependency tree must have exactly one root, found " +
                          std::to_string(roots));
  // walk up from every token; a tree of n nodes never needs more than n hops
  for (int i = 0; i < n; ++i) {
    int cur = i, hops = 0;
    while (sentence.tokens[cur].head.has_value()) {
      cur = *sentence.tokens[cur].head;
      if (++hops > n)
        throw StructuralError("cycle in head links reachable from token " +
                              std::to_string(i));
    }
  }
}

void check_corpus(const Corpus& corpus, bool strict_roles) {
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    const auto& sent = corpus.sentences[si];
    check_tree(sent);
    for (const auto& pred : sent.predicates) {
      if (pred.token_index < 0 ||
          pred.token_index >= static_cast<int>(sent.tokens.size()))
        throw DataError("predicate index out of range in sentence " +
                        std::to_string(si));
      std::set<int> seen;
      for (const auto& arg : pred.arguments) {
        if (arg.token_index < 0 ||
            arg.token_index >= static_cast<int>(sent.tokens.size()))
          throw DataError("argument index out of range in sentence " +
                          std::to_string(si));
        if (!seen.insert(arg.token_index).second)
          throw DataError("duplicate argument index in sentence " +
                          std::to_string(si));
        if (arg.lemma.empty())
          throw DataError("empty argument lemma in sentence " +
                          std::to_string(si));
        if (!corpus.lemma_vocab.contains(arg.lemma))
          throw DataError("argument lemma missing from vocabulary: " +
                          arg.lemma);
        if (strict_roles && arg.gold_role.has_value() &&
            !corpus.roles.contains(*arg.gold_role))
          throw DataError("gold role outside inventory: " + *arg.gold_role);
      }
    }
  }
}

VerbalizationMap VerbalizationMap::from_tsv(const std::string& text) {
  VerbalizationMap map;
  std::istringstream is(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("verbalization line " + std::to_string(lineno) +
                       ": expected two tab-separated columns");
    std::string noun = line.substr(0, tab);
    std::string verb = line.substr(tab + 1);
    if (auto extra = verb.find('\t'); extra != std::string::npos)
      verb = verb.substr(0, extra);
    if (noun.empty() || verb.empty())
      throw ParseError("verbalization line " + std::to_string(lineno) +
                       ": empty lemma");
    map.entries[noun] = verb;
  }
  return map;
}

VerbalizationMap VerbalizationMap::load_file(const std::string& path) {
  return from_tsv(read_text_file(path));
}

std::string verbalize(const std::string& lemma, const VerbalizationMap& map) {
  auto it = map.entries.find(lemma);
  return it == map.entries.end() ? lemma : it->second;
}

size_t apply_verbalization(Corpus& corpus, const VerbalizationMap& map) {
  size_t changed = 0;
  for (auto& sent : corpus.sentences)
    for (auto& pred : sent.predicates) {
      std::string mapped = verbalize(pred.lemma, map);
      if (mapped != pred.lemma) {
        pred.lemma = std::move(mapped);
        ++changed;
      }
    }
  return changed;
}

namespace {

bool pos_in(const std::string& pos, const std::vector<std::string>& set) {
  return std::find(set.begin(), set.end(), pos) != set.end();
}

bool is_nominal_pos(const std::string& pos, const PrepositionConfig& cfg) {
  if (!pos.empty() && pos[0] == 'N') return true;
  return pos_in(pos, cfg.nominal_pos_extra);
}

}  // namespace

HeadwordResult preposition_headword(const AnnotatedSentence& sentence,
                                    int arg_index,
                                    const PrepositionConfig& cfg) {
  if (arg_index < 0 || arg_index >= static_cast<int>(sentence.tokens.size()))
    throw DataError("argument index out of range: " +
                    std::to_string(arg_index));
  const Token& tok = sentence.tokens[arg_index];
  if (!pos_in(tok.pos, cfg.prep_pos)) return {arg_index, false};

  int rightmost_any = -1, rightmost_nominal = -1;
  for (int i = 0; i < static_cast<int>(sentence.tokens.size()); ++i) {
    const auto& h = sentence.tokens[i].head;
    if (!h.has_value() || *h != arg_index) continue;
    rightmost_any = i;
    if (is_nominal_pos(sentence.tokens[i].pos, cfg)) rightmost_nominal = i;
  }
  if (rightmost_any < 0) return {arg_index, true};
  return {rightmost_nominal >= 0 ? rightmost_nominal : rightmost_any, false};
}

ReplacementStats replace_preposition_headwords(Corpus& corpus,
                                               const PrepositionConfig& cfg) {
  ReplacementStats stats;
  for (auto& sent : corpus.sentences) {
    for (auto& pred : sent.predicates) {
      std::vector<ArgumentSlot> kept;
      std::set<int> taken;
      for (auto& slot : pred.arguments) {
        HeadwordResult r = preposition_headword(sent, slot.token_index, cfg);
        if (r.flagged) ++stats.flagged;
        if (r.index != slot.token_index) {
          ++stats.replaced;
          slot.token_index = r.index;
          slot.lemma = sent.tokens[r.index].lemma;
        }
        if (!taken.insert(slot.token_index).second) {
          ++stats.dropped_duplicate_slots;
          continue;
        }
        kept.push_back(slot);
      }
      pred.arguments = std::move(kept);
    }
  }
  corpus.rebuild_lemma_vocab();
  return stats;
}

namespace {

std::map<std::string, size_t> predicate_counts(const Corpus& c) {
  std::map<std::string, size_t> counts;
  for (const auto& s : c.sentences)
    for (const auto& p : s.predicates) ++counts[p.lemma];
  return counts;
}

Corpus filter_one(const Corpus& corpus, const std::set<std::string>& keep) {
  Corpus out;
  out.domain = corpus.domain;
  out.roles = corpus.roles;
  for (const auto& sent : corpus.sentences) {
    AnnotatedSentence copy;
    copy.tokens = sent.tokens;
    for (const auto& pred : sent.predicates) {
      if (!keep.count(pred.lemma)) continue;
      PredicateInstance kept = pred;
      kept.arguments.clear();
      for (const auto& slot : pred.arguments) {
        if (slot.gold_role.has_value() &&
            !corpus.roles.contains(*slot.gold_role))
          continue;
        kept.arguments.push_back(slot);
      }
      if (kept.arguments.empty()) continue;
      copy.predicates.push_back(std::move(kept));
    }
    out.sentences.push_back(std::move(copy));
  }
  out.rebuild_lemma_vocab();
  return out;
}

}  // namespace

std::pair<Corpus, Corpus> filter_corpus(const Corpus& verbal,
                                        const Corpus& nominal,
                                        const FilterConfig& cfg) {
  auto vc = predicate_counts(verbal);
  auto nc = predicate_counts(nominal);
  std::set<std::string> keep;
  for (const auto& [lemma, n_count] : nc) {
    auto it = vc.find(lemma);
    if (it == vc.end()) continue;
    if (n_count >= cfg.min_nominal_instances &&
        it->second >= cfg.min_verbal_instances)
      keep.insert(lemma);
  }
  if (keep.empty()) throw DataError("no shared predicates between domains");
  return {filter_one(verbal, keep), filter_one(nominal, keep)};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw DataError("short write: " + path);
}

}  // namespace srlx
