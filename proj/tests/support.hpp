#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "spanforge/corpus.hpp"
#include "spanforge/features.hpp"
#include "spanforge/random.hpp"
#include "spanforge/reconstruct.hpp"
#include "spanforge/scoring.hpp"

namespace sftest {

using namespace spanforge;
using LexEntries = std::map<std::string, std::vector<std::string>>;

inline Sentence make_sentence(std::string id, const std::vector<std::string>& words,
                              std::vector<MweAnnotation> mwes = {}, Split split = Split::Train) {
  Sentence s;
  s.id = std::move(id);
  s.split = split;
  for (std::size_t i = 0; i < words.size(); ++i) {
    Token t;
    t.index = static_cast<int>(i);
    t.surface = words[i];
    s.tokens.push_back(std::move(t));
  }
  s.mwes = std::move(mwes);
  return s;
}

inline Sentence looked_up() {
  return make_sentence("s1", {"looked", "the", "information", "up"}, {{{0, 3}, MweType::Verb}});
}

// Chain heads: token i attaches to i - 1, token 0 is the root.
inline std::vector<std::optional<int>> chain_heads(int n) {
  std::vector<std::optional<int>> h(n);
  for (int i = 1; i < n; ++i) h[i] = i - 1;
  return h;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("spanforge-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  out << data;
}

// ---- random instances ------------------------------------------------------

inline double rand_unit(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Values on a coarse grid so that ties and threshold hits actually occur.
inline double rand_prob(std::mt19937_64& rng) {
  int bucket = std::uniform_int_distribution<int>(0, 20)(rng);
  if (bucket < 6) return 0.0;
  return std::uniform_int_distribution<int>(0, 20)(rng) / 20.0;
}

inline TokenProbabilities random_probs(std::mt19937_64& rng, std::size_t n) {
  TokenProbabilities p;
  p.sentence_id = "r";
  for (std::size_t i = 0; i < n; ++i) {
    p.p_start.push_back(rand_prob(rng));
    p.p_end.push_back(rand_prob(rng));
    p.p_inside.push_back(rand_prob(rng));
  }
  return p;
}

inline Thresholds random_thresholds(std::mt19937_64& rng) {
  auto pick = [&] { return std::uniform_int_distribution<int>(1, 19)(rng) / 20.0; };
  return {pick(), pick(), pick()};
}

// Random forest: each token either is a root or attaches to an earlier token
// of a random permutation, so the structure is acyclic.
inline std::vector<std::optional<int>> random_forest(std::mt19937_64& rng, int n) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::optional<int>> heads(n);
  for (int k = 1; k < n; ++k) {
    if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) continue;
    heads[order[k]] = order[std::uniform_int_distribution<int>(0, k - 1)(rng)];
  }
  return heads;
}

// Floyd-Warshall over the undirected head graph, then capped.
inline std::vector<std::vector<int>> floyd_distances(const std::vector<std::optional<int>>& heads, int cap) {
  const int n = static_cast<int>(heads.size());
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (int i = 0; i < n; ++i)
    if (heads[i]) d[i][*heads[i]] = d[*heads[i]][i] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (auto& v : row) v = std::min(v, cap);
  return d;
}

inline std::set<std::vector<int>> index_sets(const std::vector<PredictedMwe>& mwes) {
  std::set<std::vector<int>> out;
  for (const auto& m : mwes) out.insert(m.token_indices);
  return out;
}

// ---- synthetic corpus --------------------------------------------------------

struct MweTemplate {
  std::vector<std::string> words;
  std::vector<int> gap_after;  // filler tokens inserted after word k (0 = none)
  MweType type;
};

// Expression words never occur as filler, and every sentence carries exactly
// one expression, so a lexicon built from train recognises test MWEs verbatim.
inline const std::vector<MweTemplate>& mwe_templates() {
  static const std::vector<MweTemplate> t = {
      {{"in", "fact"}, {0, 0}, MweType::ModConn},
      {{"stock", "market"}, {0, 0}, MweType::Noun},
      {{"hot", "dog"}, {0, 0}, MweType::Noun},
      {{"by", "and", "large"}, {0, 0, 0}, MweType::ModConn},
      {{"kind", "of"}, {0, 0}, MweType::Other},
      {{"looked", "up"}, {2, 0}, MweType::Verb},
      {{"took", "into", "account"}, {2, 0, 0}, MweType::Verb},
      {{"gave", "away"}, {1, 0}, MweType::Verb},
  };
  return t;
}

inline Sentence synthetic_sentence(std::mt19937_64& rng, const std::string& id, Split split, std::size_t which) {
  static const std::vector<std::string> filler = {"she",   "we",   "they", "often",  "today", "the",  "a",
                                                  "report", "idea", "city", "people", "said",  "that", "quietly"};
  auto pick = [&] { return filler[rng() % filler.size()]; };
  const auto& tpl = mwe_templates()[which % mwe_templates().size()];
  std::vector<std::string> words;
  std::vector<int> members;
  for (int k = static_cast<int>(rng() % 4); k > 0; --k) words.push_back(pick());
  for (std::size_t k = 0; k < tpl.words.size(); ++k) {
    members.push_back(static_cast<int>(words.size()));
    words.push_back(tpl.words[k]);
    for (int g = 0; g < tpl.gap_after[k]; ++g) words.push_back(pick());
  }
  for (int k = static_cast<int>(rng() % 4); k > 0; --k) words.push_back(pick());
  auto s = make_sentence(id, words, {{members, tpl.type}}, split);
  for (auto& t : s.tokens) {
    t.lemma = t.surface;
    t.upos = "X";
    if (t.index > 0) t.head = t.index - 1;
  }
  return s;
}

// `train` training sentences cycling through every template, then `test`
// test sentences.
inline Corpus synthetic_corpus(int train, int test, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Corpus c{"synthetic", {}};
  for (int k = 0; k < train; ++k)
    c.sentences.push_back(synthetic_sentence(rng, "train-" + std::to_string(k), Split::Train, k));
  for (int k = 0; k < test; ++k)
    c.sentences.push_back(synthetic_sentence(rng, "test-" + std::to_string(k), Split::Test, rng()));
  return c;
}

}  // namespace sftest
