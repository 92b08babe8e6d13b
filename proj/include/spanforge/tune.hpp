#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spanforge/evaluate.hpp"
#include "spanforge/features.hpp"
#include "spanforge/reconstruct.hpp"
#include "spanforge/scoring.hpp"

namespace spanforge {

// Candidate values for each threshold, strictly ascending, within [0, 1].
struct ThresholdGrid {
  std::vector<double> values;

  // 0.20, 0.25, ..., 0.60
  static ThresholdGrid defaults();
  // "lo:hi:step", inclusive of hi when it falls on the grid.
  static ThresholdGrid parse(std::string_view text);
};

void validate(const ThresholdGrid& grid);

struct TracePoint {
  Thresholds thresholds;
  Prf prf;
};

struct TuneResult {
  Thresholds best;
  Ratio best_f1;
  std::vector<TracePoint> trace;  // lexicographic (start, end, inside) order
};

// Predictions for every sentence of `corpus`, in corpus order.
Predictions reconstruct_corpus(const Corpus& corpus, const ProbabilityMap& probs, const Thresholds& t,
                               const ReconstructionConfig& cfg,
                               const std::map<std::string, DepDistanceMatrix>* matrices);

// Exhaustive search over grid^3. Ties on F1 go to the lexicographically
// smallest triple. `jobs` worker threads; 0 means hardware concurrency.
// `matrices` may be null when cfg.dep_filter is off.
TuneResult grid_search(const Corpus& dev, const ProbabilityMap& probs, const ThresholdGrid& grid,
                       const ReconstructionConfig& cfg,
                       const std::map<std::string, DepDistanceMatrix>* matrices, unsigned jobs = 1);

// Tab-separated trace with a header row.
std::string trace_tsv(const TuneResult& result);

// Seeded held-out slice of ⌊fraction · |train|⌋ sentences. Returns
// (remaining, carved); carved sentences are relabelled Dev and keep corpus order.
std::pair<Corpus, Corpus> carve_dev(const Corpus& train, double fraction, std::uint64_t seed);

}  // namespace spanforge
