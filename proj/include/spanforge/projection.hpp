#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spanforge/corpus.hpp"

namespace spanforge {

// START/END/INSIDE bits for one sentence, one entry per token.
struct LabelProjection {
  std::string sentence_id;
  std::vector<std::uint8_t> start;
  std::vector<std::uint8_t> end;
  std::vector<std::uint8_t> inside;

  bool operator==(const LabelProjection&) const = default;
};

LabelProjection project(const Sentence& sentence);

// Number of MWE boundaries that collapse onto a bit already set by another
// MWE: (mwes - distinct starts) + (mwes - distinct ends).
std::size_t boundary_collisions(const Sentence& sentence);

struct ProjectionArtifact {
  std::string version;
  std::string corpus_name;
  std::vector<LabelProjection> projections;
  std::string checksum;  // SHA-256 of serialize_projections(projections)

  bool operator==(const ProjectionArtifact&) const = default;
};

// Compact, fixed-field-order JSON array. This exact byte string is what the
// checksum covers and what appears in the artifact file.
std::string serialize_projections(const std::vector<LabelProjection>& projections);

ProjectionArtifact build_artifact(const Corpus& corpus, std::string version);
std::string serialize_artifact(const ProjectionArtifact& artifact);
// Throws IntegrityError when the digest of the stored payload bytes differs
// from the stored checksum; the digest is checked before the JSON is parsed.
ProjectionArtifact parse_artifact(std::string_view text);

ProjectionArtifact write_artifact(const Corpus& corpus, std::string version,
                                  const std::filesystem::path& path);
ProjectionArtifact read_artifact(const std::filesystem::path& path);

}  // namespace spanforge
