#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "spanforge/corpus.hpp"

namespace spanforge {

// Lowercased word -> similar words, best first.
class SubstitutionLexicon {
 public:
  SubstitutionLexicon() = default;
  // Throws ValidationError for empty lists or a word that is its own rank-1
  // neighbour.
  explicit SubstitutionLexicon(std::map<std::string, std::vector<std::string>> entries);

  static SubstitutionLexicon load(const std::filesystem::path& path);
  static SubstitutionLexicon parse(std::string_view text);

  // Rank-1 neighbour of the lowercased word, or nullptr.
  const std::string* best(std::string_view word) const;
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

enum class AugmentStrategy { Oversample, LexicalSubstitution };

AugmentStrategy parse_augment_strategy(std::string_view name);  // "oversample" / "lexsub"

struct AugmentConfig {
  AugmentStrategy strategy = AugmentStrategy::Oversample;
  double ratio = 0.30;
  std::uint64_t seed = 0;
};

// ratio in (0, 1]; throws ConfigError otherwise.
void validate(const AugmentConfig& cfg);
// One of 0.10, 0.20, 0.30, 0.40.
bool is_standard_ratio(double ratio);

struct AugmentResult {
  Corpus corpus;
  std::size_t added = 0;
  std::size_t skipped = 0;  // lexical substitution: selected sentences without an eligible token
};

// Seeded uniform selection of ⌊ratio · |MWE-bearing train sentences|⌋
// positions into `train.sentences`, in selection order.
std::vector<std::size_t> select_for_augmentation(const Corpus& train, double ratio, std::uint64_t seed);

// Appends one exact copy of each selected sentence, id suffixed "#dupK".
AugmentResult oversample(const Corpus& train, const AugmentConfig& cfg);

// Appends, per selected sentence, a copy with one randomly chosen token outside
// every MWE replaced by its rank-1 neighbour; ids suffixed "#subK".
AugmentResult lexical_substitute(const Corpus& train, const SubstitutionLexicon& lexicon,
                                 const AugmentConfig& cfg);

AugmentResult augment(const Corpus& train, const AugmentConfig& cfg, const SubstitutionLexicon* lexicon);

}  // namespace spanforge
