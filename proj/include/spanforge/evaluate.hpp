#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spanforge/corpus.hpp"
#include "spanforge/reconstruct.hpp"

namespace spanforge {

struct SentencePredictions {
  std::string sentence_id;
  std::vector<PredictedMwe> mwes;

  bool operator==(const SentencePredictions&) const = default;
};

using Predictions = std::vector<SentencePredictions>;

std::string serialize_predictions(const Predictions& preds);
void write_predictions(const Predictions& preds, const std::filesystem::path& path);
Predictions parse_predictions(std::string_view text);
Predictions load_predictions(const std::filesystem::path& path);

// num / den, presented as a percent rounded half-up to one
// decimal, computed exactly in integers. A zero denominator yields 0.
struct Ratio {
  std::size_t num = 0;
  std::size_t den = 0;

  double value() const { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }
  // Percent in tenths, e.g. 693 for 69.3%.
  long percent_tenths() const;
  double percent() const { return static_cast<double>(percent_tenths()) / 10.0; }
  std::string percent_string() const;

  bool operator==(const Ratio&) const = default;
};

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const MatchCounts&) const = default;
};

struct Prf {
  Ratio precision;
  Ratio recall;
  Ratio f1;  // 2tp / (2tp + fp + fn), identical to 2PR / (P + R)
};

// A prediction is a true positive iff its index set equals a not yet matched
// gold set in the same sentence. Throws ValidationError on unknown ids.
MatchCounts exact_match_counts(const Predictions& pred, const Corpus& gold);

Prf micro_prf(const MatchCounts& c);

struct TypeRecall {
  std::size_t matched = 0;
  std::size_t support = 0;
  Ratio recall() const { return {matched, support}; }
};

// Types with zero support are absent.
std::map<MweType, TypeRecall> type_recall(const Predictions& pred, const Corpus& gold);

struct ContinuityBucket {
  std::size_t tp = 0;
  std::size_t n_pred = 0;
  std::size_t n_gold = 0;  // support

  Ratio precision() const { return {tp, n_pred}; }
  Ratio recall() const { return {tp, n_gold}; }
  Ratio f1() const { return {2 * tp, n_pred + n_gold}; }
};

struct ContinuityMetrics {
  ContinuityBucket continuous;
  ContinuityBucket discontinuous;
};

ContinuityMetrics continuity_metrics(const Predictions& pred, const Corpus& gold);

struct EvalReport {
  MatchCounts counts;
  Prf micro;
  std::map<MweType, TypeRecall> per_type_recall;
  ContinuityMetrics continuity;
  std::size_t n_pred_continuous = 0;
  std::size_t n_pred_discontinuous = 0;
};

EvalReport evaluate(const Predictions& pred, const Corpus& gold);

// Machine-readable JSON object mirroring EvalReport (raw ratios and rounded
// percentages).
std::string report_json(const EvalReport& report, int indent = 2);
std::string report_table(const EvalReport& report);

}  // namespace spanforge
