#include "spanforge/projection.hpp"

#include <optional>
#include <set>

#include "io_util.hpp"
#include "spanforge/digest.hpp"
#include "spanforge/error.hpp"

namespace spanforge {

using detail::Json;

LabelProjection project(const Sentence& sentence) {
  const auto n = sentence.tokens.size();
  LabelProjection p{sentence.id, std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0),
                    std::vector<std::uint8_t>(n, 0)};
  for (const auto& mwe : sentence.mwes) {
    const auto& idx = mwe.token_indices;
    if (idx.empty()) continue;
    p.start[static_cast<std::size_t>(idx.front())] = 1;
    p.end[static_cast<std::size_t>(idx.back())] = 1;
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) p.inside[static_cast<std::size_t>(idx[k])] = 1;
  }
  return p;
}

std::size_t boundary_collisions(const Sentence& sentence) {
  std::set<int> starts, ends;
  for (const auto& mwe : sentence.mwes) {
    starts.insert(mwe.token_indices.front());
    ends.insert(mwe.token_indices.back());
  }
  const auto m = sentence.mwes.size();
  return (m - starts.size()) + (m - ends.size());
}

namespace {

Json bits_to_json(const std::vector<std::uint8_t>& bits) {
  Json arr = Json::array();
  for (auto b : bits) arr.push_back(static_cast<int>(b));
  return arr;
}

Json projections_to_json(const std::vector<LabelProjection>& projections) {
  Json arr = Json::array();
  for (const auto& p : projections) {
    Json rec;
    rec["sentence_id"] = p.sentence_id;
    rec["start"] = bits_to_json(p.start);
    rec["end"] = bits_to_json(p.end);
    rec["inside"] = bits_to_json(p.inside);
    arr.push_back(std::move(rec));
  }
  return arr;
}

std::vector<std::uint8_t> json_to_bits(const Json& rec, const char* key, std::size_t record) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_array())
    throw FormatError("projection " + std::to_string(record) + ": missing array '" + key + "'");
  std::vector<std::uint8_t> bits;
  bits.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
      throw FormatError("projection " + std::to_string(record) + ": '" + key + "' values must be 0 or 1");
    bits.push_back(static_cast<std::uint8_t>(v.get<int>()));
  }
  return bits;
}

}  // namespace

std::string serialize_projections(const std::vector<LabelProjection>& projections) {
  return projections_to_json(projections).dump();
}

ProjectionArtifact build_artifact(const Corpus& corpus, std::string version) {
  ProjectionArtifact a;
  a.version = std::move(version);
  a.corpus_name = corpus.name;
  a.projections.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) a.projections.push_back(project(s));
  a.checksum = sha256_hex(serialize_projections(a.projections));
  return a;
}

std::string serialize_artifact(const ProjectionArtifact& artifact) {
  std::string out = "{\"version\":";
  out += Json(artifact.version).dump();
  out += ",\"corpus_name\":";
  out += Json(artifact.corpus_name).dump();
  out += ",\"checksum\":";
  out += Json(artifact.checksum).dump();
  out += ",\"projections\":";
  out += serialize_projections(artifact.projections);
  out += "}\n";
  return out;
}

namespace {

// Payload bytes exactly as stored: everything after the "projections" key up to
// the closing brace of the document.
std::optional<std::string_view> raw_payload(std::string_view text) {
  constexpr std::string_view key = "\"projections\":";
  auto at = text.find(key);
  if (at == std::string_view::npos) return std::nullopt;
  auto close = text.find_last_not_of(" \t\r\n");
  if (close == std::string_view::npos || text[close] != '}' || close < at + key.size()) return std::nullopt;
  return text.substr(at + key.size(), close - at - key.size());
}

std::optional<std::string> raw_checksum(std::string_view text) {
  constexpr std::string_view key = "\"checksum\":\"";
  auto at = text.find(key);
  if (at == std::string_view::npos) return std::nullopt;
  auto close = text.find('"', at + key.size());
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(at + key.size(), close - at - key.size()));
}

}  // namespace

ProjectionArtifact parse_artifact(std::string_view text) {
  auto payload_bytes = raw_payload(text);
  auto stored = raw_checksum(text);
  if (payload_bytes && stored) {
    auto actual = sha256_hex(*payload_bytes);
    if (actual != *stored) throw IntegrityError(*stored, actual);
  }

  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("artifact is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("artifact is not a JSON object");
  ProjectionArtifact a;
  a.version = detail::require<std::string>(doc, "version", 0);
  a.corpus_name = detail::require<std::string>(doc, "corpus_name", 0);
  a.checksum = detail::require<std::string>(doc, "checksum", 0);
  auto payload = doc.find("projections");
  if (payload == doc.end() || !payload->is_array()) throw FormatError("missing array 'projections'");

  if (!payload_bytes || !stored) {
    const auto actual = sha256_hex(payload->dump());
    if (actual != a.checksum) throw IntegrityError(a.checksum, actual);
  }

  std::size_t record = 0;
  for (const auto& rec : *payload) {
    ++record;
    if (!rec.is_object()) throw FormatError("projection " + std::to_string(record) + " is not an object");
    LabelProjection p;
    p.sentence_id = detail::require<std::string>(rec, "sentence_id", 0);
    p.start = json_to_bits(rec, "start", record);
    p.end = json_to_bits(rec, "end", record);
    p.inside = json_to_bits(rec, "inside", record);
    if (p.end.size() != p.start.size() || p.inside.size() != p.start.size())
      throw FormatError("projection " + std::to_string(record) + ": label sequences differ in length");
    a.projections.push_back(std::move(p));
  }
  return a;
}

ProjectionArtifact write_artifact(const Corpus& corpus, std::string version,
                                  const std::filesystem::path& path) {
  auto a = build_artifact(corpus, std::move(version));
  detail::write_file(path, serialize_artifact(a));
  return a;
}

ProjectionArtifact read_artifact(const std::filesystem::path& path) {
  return parse_artifact(detail::read_file(path));
}

}  // namespace spanforge
