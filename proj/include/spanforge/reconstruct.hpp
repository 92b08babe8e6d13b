#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "spanforge/features.hpp"
#include "spanforge/scoring.hpp"

namespace spanforge {

struct Thresholds {
  double start = 0.5;
  double end = 0.5;
  double inside = 0.5;

  auto operator<=>(const Thresholds&) const = default;
};

void validate(const Thresholds& t);

enum class OverlapPolicy { GreedyNonOverlap, AllowAll };

std::string_view to_string(OverlapPolicy policy);  // "greedy" / "all"
OverlapPolicy parse_overlap_policy(std::string_view name);

struct ReconstructionConfig {
  int max_width = 13;
  int min_members = 2;
  int max_members = 6;
  int dep_reject_above = 4;
  OverlapPolicy overlap = OverlapPolicy::GreedyNonOverlap;
  // When set, discontinuous candidates need a distance matrix.
  bool dep_filter = true;
};

void validate(const ReconstructionConfig& cfg);

struct PredictedMwe {
  std::vector<int> token_indices;  // strictly increasing
  double score = 0.0;              // p_start[first] * p_end[last]

  bool operator==(const PredictedMwe&) const = default;
};

// Work done by enumerate_candidates.
struct EnumerationCounters {
  std::size_t pair_expansions = 0;  // (start, end) pairs whose interior was scanned
};

// Candidates sorted by (first, last). At most one candidate per (start, end)
// pair: members are the two boundaries plus every interior token whose inside
// probability clears the threshold.
std::vector<PredictedMwe> enumerate_candidates(const TokenProbabilities& probs, const Thresholds& t,
                                               const ReconstructionConfig& cfg,
                                               EnumerationCounters* counters = nullptr);

// Drops discontinuous candidates with a consecutive-member distance above
// cfg.dep_reject_above. Contiguous candidates always pass. Throws ConfigError
// if `matrix` is null and a discontinuous candidate is present.
std::vector<PredictedMwe> dep_filter(std::vector<PredictedMwe> candidates,
                                     const DepDistanceMatrix* matrix, const ReconstructionConfig& cfg);

// Greedy: highest score first, ties by (first, last); a candidate is accepted
// iff it shares no token with an accepted one. Result sorted by (first, last).
std::vector<PredictedMwe> resolve_overlaps(std::vector<PredictedMwe> candidates, OverlapPolicy policy);

std::vector<PredictedMwe> reconstruct_sentence(const TokenProbabilities& probs, const Thresholds& t,
                                               const ReconstructionConfig& cfg,
                                               const DepDistanceMatrix* matrix = nullptr);

inline constexpr std::size_t kBruteForceMaxTokens = 16;

// Subset enumeration over all member sets of size min_members..max_members,
// checking every gate directly. Same output contract as reconstruct_sentence.
std::vector<PredictedMwe> brute_force_reference(const TokenProbabilities& probs, const Thresholds& t,
                                                const ReconstructionConfig& cfg,
                                                const DepDistanceMatrix* matrix = nullptr);

}  // namespace spanforge
