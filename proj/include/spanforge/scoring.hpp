#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spanforge/corpus.hpp"

namespace spanforge {

// Per-token START/END/INSIDE probabilities for one sentence.
struct TokenProbabilities {
  std::string sentence_id;
  std::vector<double> p_start;
  std::vector<double> p_end;
  std::vector<double> p_inside;

  std::size_t size() const { return p_start.size(); }
  bool operator==(const TokenProbabilities&) const = default;
};

// Lengths agree and every value lies in [0, 1]; throws ValidationError.
void validate(const TokenProbabilities& probs);

using ProbabilityMap = std::map<std::string, TokenProbabilities>;

// Lexicon key: lowercased lemma (or surface) of each member. Gapped keys come
// from discontinuous gold MWEs and match with intervening tokens.
struct LexiconKey {
  std::vector<std::string> words;
  bool gapped = false;

  auto operator<=>(const LexiconKey&) const = default;
};

inline constexpr int kMaxLexiconMembers = 13;
inline constexpr int kMaxBaselineWidth = 13;  // gapped matches: at most 11 intervening tokens

class MweLexicon {
 public:
  void add(LexiconKey key, std::size_t count = 1);
  std::size_t count(const LexiconKey& key) const;
  const std::map<LexiconKey, std::size_t>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<LexiconKey, std::size_t> entries_;
};

// Normalized word used for lexicon keys and matching.
std::string lexicon_word(const Token& token);

MweLexicon build_lexicon(const Corpus& train);

// Deterministic 0/1 scorer: every lexicon match sets p_start at its first
// member, p_end at its last member and p_inside at interior members.
TokenProbabilities baseline_score(const Sentence& sentence, const MweLexicon& lexicon);
ProbabilityMap baseline_score(const Corpus& corpus, const MweLexicon& lexicon);

// Line-delimited JSON, values written with 6 decimals.
std::string serialize_probabilities(const ProbabilityMap& probs);
void write_probabilities(const ProbabilityMap& probs, const std::filesystem::path& path);
ProbabilityMap parse_probabilities(std::string_view text);
ProbabilityMap load_probabilities(const std::filesystem::path& path);

// Every sentence of `corpus` has a record of matching length and every record
// names a sentence of `corpus` (unless allow_extra).
void check_probabilities(const Corpus& corpus, const ProbabilityMap& probs, bool allow_extra = false);

}  // namespace spanforge
