#include <sstream>

#include "json.hpp"
#include "srlx/corpus.hpp"

namespace srlx {

namespace {

using nlohmann::json;

json sentence_to_json(const AnnotatedSentence& sent) {
  json toks = json::array();
  for (const auto& t : sent.tokens)
    toks.push_back(json::array({t.surface, t.lemma, t.pos,
                                t.head.has_value() ? *t.head : -1, t.deprel}));
  json preds = json::array();
  for (const auto& p : sent.predicates) {
    json args = json::array();
    for (const auto& a : p.arguments)
      args.push_back(json::array(
          {a.token_index, a.lemma,
           a.gold_role.has_value() ? json(*a.gold_role) : json(nullptr)}));
    preds.push_back(json{{"t", p.token_index},
                         {"lemma", p.lemma},
                         {"domain", domain_name(p.domain)},
                         {"args", std::move(args)}});
  }
  return json{{"tokens", std::move(toks)}, {"predicates", std::move(preds)}};
}

AnnotatedSentence sentence_from_json(const json& j) {
  AnnotatedSentence sent;
  for (const auto& t : j.at("tokens")) {
    Token tok;
    tok.surface = t.at(0).get<std::string>();
    tok.lemma = t.at(1).get<std::string>();
    tok.pos = t.at(2).get<std::string>();
    int head = t.at(3).get<int>();
    if (head >= 0) tok.head = head;
    tok.deprel = t.at(4).get<std::string>();
    sent.tokens.push_back(std::move(tok));
  }
  for (const auto& p : j.at("predicates")) {
    PredicateInstance inst;
    inst.token_index = p.at("t").get<int>();
    inst.lemma = p.at("lemma").get<std::string>();
    inst.domain = domain_from_name(p.at("domain").get<std::string>());
    for (const auto& a : p.at("args")) {
      ArgumentSlot slot;
      slot.token_index = a.at(0).get<int>();
      slot.lemma = a.at(1).get<std::string>();
      if (!a.at(2).is_null()) slot.gold_role = a.at(2).get<std::string>();
      inst.arguments.push_back(std::move(slot));
    }
    sent.predicates.push_back(std::move(inst));
  }
  return sent;
}

}  // namespace

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  json head{{"format", "srlx-corpus"},
            {"version", 1},
            {"domain", domain_name(corpus.domain)},
            {"roles", corpus.roles.labels()},
            {"lemma_vocab",
             {{"names", corpus.lemma_vocab.names()},
              {"counts", corpus.lemma_vocab.counts()}}}};
  out << head.dump() << '\n';
  for (const auto& sent : corpus.sentences)
    out << sentence_to_json(sent).dump() << '\n';
  return out.str();
}

Corpus corpus_from_jsonl(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line))
    throw ParseError("corpus stream is empty, header record expected");
  json head;
  try {
    head = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("corpus header: ") + e.what());
  }
  if (head.value("format", "") != "srlx-corpus")
    throw ParseError("not a corpus stream (bad format field)");
  if (head.value("version", 0) != 1)
    throw ParseError("unsupported corpus version");

  Corpus corpus;
  corpus.domain = domain_from_name(head.at("domain").get<std::string>());
  corpus.roles =
      RoleInventory(head.at("roles").get<std::vector<std::string>>());
  const auto& v = head.at("lemma_vocab");
  auto names = v.at("names").get<std::vector<std::string>>();
  auto counts = v.at("counts").get<std::vector<int64_t>>();
  if (names.size() != counts.size())
    throw ParseError("vocabulary names/counts length mismatch");
  Vocab vocab(std::vector<std::string>{});
  for (size_t i = 0; i < names.size(); ++i) vocab.add(names[i], counts[i]);
  corpus.lemma_vocab = std::move(vocab);

  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("corpus line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    corpus.sentences.push_back(sentence_from_json(j));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  write_text_file(path, corpus_to_jsonl(corpus));
}

Corpus load_corpus(const std::string& path) {
  return corpus_from_jsonl(read_text_file(path));
}

}  // namespace srlx
