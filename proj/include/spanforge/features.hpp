#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spanforge/corpus.hpp"

namespace spanforge {

inline constexpr int kDefaultDistanceCap = 5;

// All-pairs shortest dependency path lengths, min(true distance, cap).
// Unreachable pairs hold cap.
class DepDistanceMatrix {
 public:
  DepDistanceMatrix() = default;
  DepDistanceMatrix(std::size_t n, int cap, std::vector<int> dist);

  std::size_t size() const { return n_; }
  int cap() const { return cap_; }
  int at(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
  const std::vector<int>& data() const { return dist_; }

  bool operator==(const DepDistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  int cap_ = kDefaultDistanceCap;
  std::vector<int> dist_;
};

// Edges are undirected (token, head) pairs. Throws StructureError on a head
// cycle and ValidationError on an out-of-range head.
DepDistanceMatrix dep_distances(std::span<const std::optional<int>> heads,
                                int cap = kDefaultDistanceCap);
DepDistanceMatrix dep_distances(const Sentence& sentence, int cap = kDefaultDistanceCap);

// Mean of dist(i, j) over j != i. Requires n >= 2.
double mean_dep_distance(const DepDistanceMatrix& matrix, std::size_t i);

struct ChunkTags {
  std::vector<std::uint8_t> inside_np;
  bool operator==(const ChunkTags&) const = default;
};

// Maximal runs of {DET, ADJ, NOUN, PROPN, NUM}, trimmed after their last
// NOUN/PROPN, are tagged inside-NP. Every token must carry a UPOS tag.
ChunkTags heuristic_chunk_tags(const Sentence& sentence);

// One record of the feature exchange file.
struct SentenceFeatures {
  std::string sentence_id;
  std::vector<std::uint8_t> inside_np;
  std::vector<std::optional<int>> dep_heads;

  bool operator==(const SentenceFeatures&) const = default;
};

using FeatureMap = std::map<std::string, SentenceFeatures>;

FeatureMap load_features(const std::filesystem::path& path);
FeatureMap parse_features(std::string_view text);
std::string serialize_features(const std::vector<SentenceFeatures>& records);
void write_features(const std::vector<SentenceFeatures>& records, const std::filesystem::path& path);

std::map<std::string, ChunkTags> load_chunk_tags(const std::filesystem::path& path);

// Features for a sentence from its own heads and the given chunk tags.
SentenceFeatures extract_features(const Sentence& sentence, const ChunkTags& chunks);

// Throws ValidationError when a record's lengths disagree with the sentence.
void check_features(const Sentence& sentence, const SentenceFeatures& features);

// Distance matrices keyed by sentence id: from the feature file heads when a
// record exists, otherwise from the sentence's own heads.
std::map<std::string, DepDistanceMatrix> distance_matrices(const Corpus& corpus,
                                                          const FeatureMap* features,
                                                          int cap = kDefaultDistanceCap);

}  // namespace spanforge
