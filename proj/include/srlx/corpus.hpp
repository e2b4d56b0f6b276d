#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace srlx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// malformed input text
struct ParseError : Error {
  using Error::Error;
};
// ill-formed dependency trees and the like
struct StructuralError : Error {
  using Error::Error;
};
// violated data-model invariants (unknown lemma, bad role, ...)
struct DataError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

enum class Domain { Verbal, Nominal };

const std::string& domain_name(Domain d);
Domain domain_from_name(const std::string& s);

struct Token {
  std::string surface;
  std::string lemma;
  std::string pos;
  std::optional<int> head;  // absent on the root
  std::string deprel;

  bool operator==(const Token&) const = default;
};

struct ArgumentSlot {
  int token_index = -1;
  std::string lemma;  // post preposition-headword replacement
  std::optional<std::string> gold_role;

  bool operator==(const ArgumentSlot&) const = default;
};

struct PredicateInstance {
  int token_index = -1;
  std::string lemma;  // post-verbalization canonical form
  Domain domain = Domain::Verbal;
  std::vector<ArgumentSlot> arguments;

  bool operator==(const PredicateInstance&) const = default;
};

struct AnnotatedSentence {
  std::vector<Token> tokens;
  std::vector<PredicateInstance> predicates;

  bool operator==(const AnnotatedSentence&) const = default;
};

// Dense string<->id table with counts. Id 0 and upward follow insertion
// order, so rebuilding from the same stream reproduces the same ids.
class Vocab {
 public:
  static constexpr int kUnk = 0;

  explicit Vocab(std::vector<std::string> reserved = {"<unk>"});

  int add(const std::string& s, int64_t count = 1);
  bool contains(const std::string& s) const { return index_.count(s) > 0; }
  int id(const std::string& s) const;          // throws DataError when absent
  int id_or_unk(const std::string& s) const;   // falls back to kUnk
  const std::string& name(int id) const;
  int64_t count(int id) const;
  size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<int64_t>& counts() const { return counts_; }

  bool operator==(const Vocab& o) const {
    return names_ == o.names_ && counts_ == o.counts_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<int64_t> counts_;
  std::unordered_map<std::string, int> index_;
};

class RoleInventory {
 public:
  RoleInventory() = default;
  explicit RoleInventory(std::vector<std::string> labels);

  // the 15 frequent labels used throughout
  static RoleInventory standard();
  // first k labels of the standard inventory, for small synthetic setups
  static RoleInventory prefix(size_t k);

  size_t size() const { return labels_.size(); }
  const std::string& label(size_t id) const;
  std::optional<size_t> find(const std::string& label) const;
  size_t id(const std::string& label) const;  // throws DataError when absent
  bool contains(const std::string& label) const;
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const RoleInventory& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, size_t> index_;
};

struct Corpus {
  Domain domain = Domain::Verbal;
  RoleInventory roles = RoleInventory::standard();
  Vocab lemma_vocab;  // argument lemmas with occurrence counts
  std::vector<AnnotatedSentence> sentences;

  size_t instance_count() const;
  size_t slot_count() const;
  // recompute lemma_vocab from the argument slots currently present
  void rebuild_lemma_vocab();

  bool operator==(const Corpus&) const = default;
};

// Tree sanity: heads in range, no self-loops, exactly one root, acyclic.
void check_tree(const AnnotatedSentence& sentence);

// Data-model invariants. With strict_roles, every gold role must be in the
// corpus inventory (holds after filtering; raw parses may carry extra labels).
void check_corpus(const Corpus& corpus, bool strict_roles);

struct VerbalizationMap {
  std::unordered_map<std::string, std::string> entries;

  // two tab-separated columns per line: noun-lemma, verb-lemma
  static VerbalizationMap from_tsv(const std::string& text);
  static VerbalizationMap load_file(const std::string& path);
};

std::string verbalize(const std::string& lemma, const VerbalizationMap& map);

// Rewrites every predicate lemma through the map. Returns #changed.
size_t apply_verbalization(Corpus& corpus, const VerbalizationMap& map);

struct PrepositionConfig {
  std::vector<std::string> prep_pos = {"IN"};
  // counted as nominal besides any POS starting with 'N'
  std::vector<std::string> nominal_pos_extra = {"PRP", "PRP$", "CD"};
};

struct HeadwordResult {
  int index = -1;
  bool flagged = false;  // preposition had no dependents
};

// If the token at arg_index is a preposition, returns the index of the noun
// phrase head it governs (rightmost nominal dependent, falling back to the
// rightmost dependent); otherwise arg_index unchanged.
HeadwordResult preposition_headword(const AnnotatedSentence& sentence,
                                    int arg_index,
                                    const PrepositionConfig& cfg = {});

struct ReplacementStats {
  size_t replaced = 0;
  size_t flagged = 0;
  size_t dropped_duplicate_slots = 0;
};

// Applies preposition_headword to every argument slot in place, updating slot
// index and lemma. Slots that collapse onto an index already taken within the
// same instance are dropped. Rebuilds the lemma vocabulary.
ReplacementStats replace_preposition_headwords(Corpus& corpus,
                                               const PrepositionConfig& cfg = {});

struct FilterConfig {
  size_t min_nominal_instances = 20;
  size_t min_verbal_instances = 10;
};

// Keeps predicates whose (post-verbalization) lemma clears both per-domain
// instance thresholds, drops argument slots with out-of-inventory roles, and
// drops instances left without arguments. Throws DataError when no predicate
// lemma survives in both domains.
std::pair<Corpus, Corpus> filter_corpus(const Corpus& verbal,
                                        const Corpus& nominal,
                                        const FilterConfig& cfg = {});

struct ConllConfig {
  // a predicate belongs to a domain when its POS starts with one of these
  std::vector<std::string> verbal_pos_prefixes = {"V"};
  std::vector<std::string> nominal_pos_prefixes = {"N"};
};

// CoNLL-2009 column text -> corpus holding the predicates of one domain.
// Gold columns (LEMMA, POS, HEAD, DEPREL) are used throughout.
Corpus parse_conll(const std::string& text, Domain domain,
                   const RoleInventory& roles = RoleInventory::standard(),
                   const ConllConfig& cfg = {});

// Line-delimited record serialization; round-trips the corpus exactly.
std::string corpus_to_jsonl(const Corpus& corpus);
Corpus corpus_from_jsonl(const std::string& text);
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace srlx
