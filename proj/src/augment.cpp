#include "spanforge/augment.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

#include "io_util.hpp"
#include "spanforge/error.hpp"
#include "spanforge/random.hpp"

namespace spanforge {

using detail::Json;

SubstitutionLexicon::SubstitutionLexicon(std::map<std::string, std::vector<std::string>> entries) {
  for (auto& [word, similar] : entries) {
    auto key = detail::to_lower_ascii(word);
    if (similar.empty()) throw ValidationError("substitution list for '" + word + "' is empty");
    if (detail::to_lower_ascii(similar.front()) == key)
      throw ValidationError("'" + word + "' maps to itself at rank 1");
    if (!entries_.emplace(key, std::move(similar)).second)
      throw ValidationError("duplicate substitution entry '" + key + "'");
  }
}

SubstitutionLexicon SubstitutionLexicon::parse(std::string_view text) {
  std::map<std::string, std::vector<std::string>> entries;
  detail::for_each_json_line(text, [&](const Json& rec, std::size_t line) {
    auto word = detail::require<std::string>(rec, "word", line);
    auto similar = detail::require<std::vector<std::string>>(rec, "similar", line);
    if (!entries.emplace(word, std::move(similar)).second)
      throw FormatError("duplicate word '" + word + "'", line);
  });
  return SubstitutionLexicon(std::move(entries));
}

SubstitutionLexicon SubstitutionLexicon::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path));
}

const std::string* SubstitutionLexicon::best(std::string_view word) const {
  auto it = entries_.find(detail::to_lower_ascii(word));
  return it == entries_.end() ? nullptr : &it->second.front();
}

AugmentStrategy parse_augment_strategy(std::string_view name) {
  auto low = detail::to_lower_ascii(name);
  if (low == "oversample") return AugmentStrategy::Oversample;
  if (low == "lexsub" || low == "lex_sub") return AugmentStrategy::LexicalSubstitution;
  throw ConfigError("unknown augmentation strategy '" + std::string(name) + "'");
}

void validate(const AugmentConfig& cfg) {
  if (!(cfg.ratio > 0.0 && cfg.ratio <= 1.0)) throw ConfigError("augmentation ratio must lie in (0, 1]");
}

bool is_standard_ratio(double ratio) {
  for (double r : {0.10, 0.20, 0.30, 0.40})
    if (std::abs(ratio - r) < 1e-9) return true;
  return false;
}

std::vector<std::size_t> select_for_augmentation(const Corpus& train, double ratio, std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < train.sentences.size(); ++i) {
    const auto& s = train.sentences[i];
    if (s.split == Split::Train && !s.mwes.empty()) eligible.push_back(i);
  }
  if (eligible.empty()) throw ValidationError("no MWE-bearing training sentences to augment");
  const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(eligible.size()) + 1e-9));
  Engine rng(seed);
  auto picks = sample_without_replacement(rng, eligible.size(), k);
  for (auto& p : picks) p = eligible[p];
  return picks;
}

namespace {

void check_fresh_id(const std::unordered_set<std::string>& ids, const std::string& id) {
  if (ids.count(id)) throw ValidationError("augmented id '" + id + "' collides with an existing sentence");
}

}  // namespace

AugmentResult oversample(const Corpus& train, const AugmentConfig& cfg) {
  validate(cfg);
  auto picks = select_for_augmentation(train, cfg.ratio, cfg.seed);
  AugmentResult r{train, 0, 0};
  std::unordered_set<std::string> ids;
  for (const auto& s : train.sentences) ids.insert(s.id);
  for (auto i : picks) {
    auto copy = train.sentences[i];
    copy.id += "#dup" + std::to_string(++r.added);
    check_fresh_id(ids, copy.id);
    ids.insert(copy.id);
    r.corpus.sentences.push_back(std::move(copy));
  }
  return r;
}

AugmentResult lexical_substitute(const Corpus& train, const SubstitutionLexicon& lexicon,
                                 const AugmentConfig& cfg) {
  validate(cfg);
  if (lexicon.empty()) throw ConfigError("substitution lexicon is empty");
  auto picks = select_for_augmentation(train, cfg.ratio, cfg.seed);
  // Token choices draw from a second stream derived from the seed.
  Engine rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  AugmentResult r{train, 0, 0};
  std::unordered_set<std::string> ids;
  for (const auto& s : train.sentences) ids.insert(s.id);
  for (auto i : picks) {
    const auto& src = train.sentences[i];
    std::set<int> in_mwe;
    for (const auto& m : src.mwes) in_mwe.insert(m.token_indices.begin(), m.token_indices.end());
    std::vector<std::size_t> eligible;
    for (std::size_t t = 0; t < src.tokens.size(); ++t)
      if (!in_mwe.count(static_cast<int>(t)) && lexicon.best(src.tokens[t].surface)) eligible.push_back(t);
    if (eligible.empty()) {
      ++r.skipped;
      continue;
    }
    auto copy = src;
    auto& tok = copy.tokens[eligible[uniform_index(rng, eligible.size())]];
    tok.surface = *lexicon.best(tok.surface);
    copy.id += "#sub" + std::to_string(++r.added);
    check_fresh_id(ids, copy.id);
    ids.insert(copy.id);
    r.corpus.sentences.push_back(std::move(copy));
  }
  return r;
}

AugmentResult augment(const Corpus& train, const AugmentConfig& cfg, const SubstitutionLexicon* lexicon) {
  if (cfg.strategy == AugmentStrategy::Oversample) return oversample(train, cfg);
  if (!lexicon) throw ConfigError("lexical substitution needs a substitution lexicon");
  return lexical_substitute(train, *lexicon, cfg);
}

}  // namespace spanforge
