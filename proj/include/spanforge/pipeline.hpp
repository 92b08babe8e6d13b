#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spanforge/augment.hpp"
#include "spanforge/evaluate.hpp"
#include "spanforge/reconstruct.hpp"
#include "spanforge/tune.hpp"

namespace spanforge {

inline constexpr const char* kToolkitVersion = "0.1.0";

// A run described by a JSON manifest. Relative paths resolve against the
// manifest's directory.
//
//   {
//     "corpus": "data/coam.jsonl",          canonical corpus with train/dev/test splits
//     "corpus_format": "canonical",         optional: canonical | coam | streusle
//     "probabilities": "probs.jsonl",       optional; baseline scorer when absent
//     "features": "features.jsonl",         optional; heads for the dependency filter
//     "thresholds": {"start": 0.5, "end": 0.6, "inside": 0.2},
//     "grid": "0.2:0.6:0.05",               used when "thresholds" is absent
//     "dev_fraction": 0.15,                 carve-out when the corpus has no dev split
//     "reconstruction": {"max_width": 13, "min_members": 2, "max_members": 6,
//                        "dep_reject_above": 4, "overlap": "greedy", "dep_filter": true},
//     "augment": {"strategy": "oversample", "ratio": 0.3, "lexicon": "lex.jsonl"},
//     "output_dir": "out",
//     "seed": 13
//   }
struct RunManifest {
  std::filesystem::path base_dir;
  std::string raw;  // manifest text as read

  std::filesystem::path corpus;
  CorpusFormat corpus_format = CorpusFormat::Canonical;
  std::optional<std::filesystem::path> probabilities;
  std::optional<std::filesystem::path> features;
  std::optional<Thresholds> thresholds;
  ThresholdGrid grid = ThresholdGrid::defaults();
  double dev_fraction = 0.15;
  ReconstructionConfig reconstruction;
  std::optional<AugmentConfig> augment;
  std::optional<std::filesystem::path> substitution_lexicon;
  std::filesystem::path output_dir;
  std::optional<std::uint64_t> seed;

  // Input files as written in the manifest, paired with their resolved paths.
  std::vector<std::pair<std::string, std::filesystem::path>> inputs() const;
};

RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
RunManifest load_manifest(const std::filesystem::path& path);

struct RunOptions {
  std::uint64_t fallback_seed = 0;  // used when the manifest has no seed
  unsigned jobs = 1;
};

struct RunSummary {
  Thresholds thresholds;
  EvalReport report;
  std::vector<std::filesystem::path> outputs;
};

// Stages: check inputs, load, augment, select dev, score, tune, reconstruct,
// evaluate, write. Nothing is written unless every stage succeeds. Errors
// keep their type and gain a "stage '<name>'" prefix.
RunSummary run_pipeline(const RunManifest& manifest, const RunOptions& options = {});

}  // namespace spanforge
