#include <cctype>
#include <sstream>
#include <vector>

#include "srlx/corpus.hpp"

namespace srlx {

namespace {

// fixed CoNLL-2009 layout; APRED columns follow
constexpr size_t kColLemma = 2;
constexpr size_t kColPos = 4;
constexpr size_t kColHead = 8;
constexpr size_t kColDeprel = 10;
constexpr size_t kColFillpred = 12;
constexpr size_t kColPred = 13;
constexpr size_t kFixedCols = 14;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool pos_matches(const std::string& pos,
                 const std::vector<std::string>& prefixes) {
  for (const auto& p : prefixes)
    if (pos.rfind(p, 0) == 0) return true;
  return false;
}

// "acquire.01" -> "acquire"; leaves lemmas with non-numeric dots alone
std::string strip_sense(const std::string& pred) {
  auto dot = pred.rfind('.');
  if (dot == std::string::npos || dot + 1 == pred.size()) return pred;
  for (size_t i = dot + 1; i < pred.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(pred[i]))) return pred;
  return pred.substr(0, dot);
}

struct RawSentence {
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> linenos;
};

void flush_sentence(const RawSentence& raw, Domain domain,
                    const ConllConfig& cfg, Corpus& corpus) {
  if (raw.rows.empty()) return;
  AnnotatedSentence sent;
  size_t n_preds = 0;
  for (const auto& row : raw.rows)
    if (row[kColFillpred] == "Y" && row[kColPred] != "_") ++n_preds;

  std::vector<int> pred_rows;  // row index of the k-th filled predicate
  for (size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& row = raw.rows[i];
    size_t expected = kFixedCols + n_preds;
    if (row.size() != expected)
      throw ParseError("line " + std::to_string(raw.linenos[i]) +
                       ": expected " + std::to_string(expected) +
                       " columns, found " + std::to_string(row.size()));
    Token tok;
    tok.surface = row[1];
    tok.lemma = row[kColLemma];
    tok.pos = row[kColPos];
    tok.deprel = row[kColDeprel];
    int head;
    try {
      head = std::stoi(row[kColHead]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(raw.linenos[i]) +
                       ": HEAD is not an integer: " + row[kColHead]);
    }
    if (head != 0) tok.head = head - 1;
    sent.tokens.push_back(std::move(tok));
    if (row[kColFillpred] == "Y" && row[kColPred] != "_")
      pred_rows.push_back(static_cast<int>(i));
  }
  check_tree(sent);

  for (size_t k = 0; k < pred_rows.size(); ++k) {
    int pi = pred_rows[k];
    const auto& prow = raw.rows[pi];
    const std::string& pos = prow[kColPos];
    Domain pred_domain;
    if (pos_matches(pos, cfg.verbal_pos_prefixes))
      pred_domain = Domain::Verbal;
    else if (pos_matches(pos, cfg.nominal_pos_prefixes))
      pred_domain = Domain::Nominal;
    else
      continue;
    if (pred_domain != domain) continue;

    PredicateInstance inst;
    inst.token_index = pi;
    inst.lemma = strip_sense(prow[kColPred]);
    inst.domain = domain;
    for (size_t i = 0; i < raw.rows.size(); ++i) {
      const std::string& role = raw.rows[i][kFixedCols + k];
      if (role == "_" || role.empty()) continue;
      ArgumentSlot slot;
      slot.token_index = static_cast<int>(i);
      slot.lemma = raw.rows[i][kColLemma];
      slot.gold_role = role;
      inst.arguments.push_back(std::move(slot));
    }
    sent.predicates.push_back(std::move(inst));
  }
  corpus.sentences.push_back(std::move(sent));
}

}  // namespace

Corpus parse_conll(const std::string& text, Domain domain,
                   const RoleInventory& roles, const ConllConfig& cfg) {
  Corpus corpus;
  corpus.domain = domain;
  corpus.roles = roles;

  std::istringstream is(text);
  std::string line;
  RawSentence raw;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush_sentence(raw, domain, cfg, corpus);
      raw = RawSentence{};
      continue;
    }
    if (line[0] == '#') continue;
    raw.linenos.push_back(lineno);
    raw.rows.push_back(split_tabs(line));
    if (raw.rows.back().size() < kFixedCols)
      throw ParseError("line " + std::to_string(lineno) + ": expected at least " +
                       std::to_string(kFixedCols) + " columns, found " +
                       std::to_string(raw.rows.back().size()));
  }
  flush_sentence(raw, domain, cfg, corpus);
  corpus.rebuild_lemma_vocab();
  return corpus;
}

}  // namespace srlx
