#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spanforge {

struct Token {
  int index = 0;
  std::string surface;
  std::optional<std::string> lemma;
  std::optional<std::string> upos;
  std::optional<int> head;  // absent for root or unparsed tokens
  std::optional<std::string> deprel;

  bool operator==(const Token&) const = default;
};

enum class MweType { Noun, Verb, ModConn, Clause, Other };

inline constexpr std::array<MweType, 5> kAllMweTypes = {
    MweType::Noun, MweType::Verb, MweType::ModConn, MweType::Clause, MweType::Other};

// "NOUN", "VERB", "MOD/CONN", "CLAUSE", "OTHER".
std::string_view to_string(MweType type);
// Accepts the names above plus "MOD_CONN"; case-insensitive.
MweType parse_mwe_type(std::string_view label);

struct MweAnnotation {
  std::vector<int> token_indices;  // strictly increasing, size >= 2
  MweType type = MweType::Other;

  bool continuous() const;
  // last - first + 1
  int width() const;

  bool operator==(const MweAnnotation&) const = default;
};

enum class Split { Train, Dev, Test };

std::string_view to_string(Split split);
Split parse_split(std::string_view label);

struct Sentence {
  std::string id;
  std::vector<Token> tokens;
  std::vector<MweAnnotation> mwes;
  Split split = Split::Train;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<Sentence> sentences;

  bool operator==(const Corpus&) const = default;
};

// True when the indices form a contiguous integer range.
bool is_contiguous(const std::vector<int>& sorted_indices);

// Throws ValidationError naming the first violated invariant.
void validate(const Sentence& sentence);
void validate(const Corpus& corpus);

enum class CorpusFormat { Canonical, Coam, Streusle };

CorpusFormat parse_corpus_format(std::string_view name);

// STREUSLE fine-grained label -> MweType table. Keys are matched exactly.
class StreusleTypeMap {
 public:
  // The table shipped with the toolkit (mirrors data/streusle_type_map.tsv).
  static const StreusleTypeMap& defaults();
  // Tab-separated "label<TAB>TYPE" lines; '#' starts a comment.
  static StreusleTypeMap load(const std::filesystem::path& path);

  explicit StreusleTypeMap(std::map<std::string, MweType, std::less<>> table);

  // Throws ValidationError for labels not in the table. Never returns Clause.
  MweType map(std::string_view fine_label) const;
  const std::map<std::string, MweType, std::less<>>& table() const { return table_; }

 private:
  std::map<std::string, MweType, std::less<>> table_;
};

MweType map_streusle_type(std::string_view fine_label);

struct LoadOptions {
  // Split assigned to records that do not carry one. When unset, the STREUSLE
  // reader infers it from the file name (train/dev/test) and falls back to Train.
  std::optional<Split> default_split;
  const StreusleTypeMap* type_map = nullptr;  // defaults() when null
};

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& options = {});

// Canonical line-delimited JSON, one sentence per line.
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);
Corpus parse_canonical(std::string_view text, std::string name);

struct CorpusStats {
  struct SplitCounts {
    std::size_t sentences = 0;
    std::size_t mwes = 0;
    bool operator==(const SplitCounts&) const = default;
  };
  std::map<Split, SplitCounts> per_split;
  std::map<MweType, std::size_t> type_histogram;
  std::size_t continuous = 0;
  std::size_t discontinuous = 0;
  std::map<int, std::size_t> span_length_histogram;  // width -> count
  std::map<int, std::size_t> member_count_histogram;

  std::size_t total_sentences() const;
  std::size_t total_mwes() const { return continuous + discontinuous; }
};

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace spanforge
