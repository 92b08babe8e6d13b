#include "spanforge/features.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "io_util.hpp"
#include "spanforge/error.hpp"

namespace spanforge {

using detail::Json;

DepDistanceMatrix::DepDistanceMatrix(std::size_t n, int cap, std::vector<int> dist)
    : n_(n), cap_(cap), dist_(std::move(dist)) {
  if (dist_.size() != n * n) throw ValidationError("distance matrix has the wrong size");
}

namespace {

void check_heads(std::span<const std::optional<int>> heads) {
  const auto n = static_cast<int>(heads.size());
  for (int i = 0; i < n; ++i) {
    const auto& h = heads[static_cast<std::size_t>(i)];
    if (!h) continue;
    if (*h < 0 || *h >= n || *h == i)
      throw ValidationError("token " + std::to_string(i) + " has invalid head " + std::to_string(*h));
  }
  // Follow head pointers; 0 = unvisited, 1 = on current walk, 2 = done.
  std::vector<int> state(heads.size(), 0);
  for (int i = 0; i < n; ++i) {
    std::vector<int> walk;
    int cur = i;
    while (cur >= 0 && state[static_cast<std::size_t>(cur)] == 0) {
      state[static_cast<std::size_t>(cur)] = 1;
      walk.push_back(cur);
      const auto& h = heads[static_cast<std::size_t>(cur)];
      cur = h ? *h : -1;
    }
    if (cur >= 0 && state[static_cast<std::size_t>(cur)] == 1) {
      std::string cycle;
      auto it = std::find(walk.begin(), walk.end(), cur);
      for (; it != walk.end(); ++it) cycle += std::to_string(*it) + " -> ";
      cycle += std::to_string(cur);
      throw StructureError("head cycle: " + cycle);
    }
    for (int t : walk) state[static_cast<std::size_t>(t)] = 2;
  }
}

}  // namespace

DepDistanceMatrix dep_distances(std::span<const std::optional<int>> heads, int cap) {
  if (cap < 0) throw ConfigError("distance cap must be non-negative");
  check_heads(heads);
  const auto n = heads.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!heads[i]) continue;
    auto h = static_cast<std::size_t>(*heads[i]);
    adj[i].push_back(h);
    adj[h].push_back(i);
  }
  std::vector<int> dist(n * n, cap);
  std::vector<int> level(n);
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(level.begin(), level.end(), -1);
    level[src] = 0;
    std::deque<std::size_t> queue{src};
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      dist[src * n + u] = std::min(level[u], cap);
      if (level[u] >= cap) continue;  // anything further is capped anyway
      for (auto v : adj[u]) {
        if (level[v] >= 0) continue;
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return DepDistanceMatrix(n, cap, std::move(dist));
}

DepDistanceMatrix dep_distances(const Sentence& sentence, int cap) {
  std::vector<std::optional<int>> heads;
  heads.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) heads.push_back(t.head);
  return dep_distances(heads, cap);
}

double mean_dep_distance(const DepDistanceMatrix& matrix, std::size_t i) {
  const auto n = matrix.size();
  if (n < 2) throw ValidationError("mean dependency distance needs at least 2 tokens");
  if (i >= n) throw ValidationError("token index " + std::to_string(i) + " out of range");
  long total = 0;
  for (std::size_t j = 0; j < n; ++j)
    if (j != i) total += matrix.at(i, j);
  return static_cast<double>(total) / static_cast<double>(n - 1);
}

ChunkTags heuristic_chunk_tags(const Sentence& sentence) {
  auto np_like = [](const std::string& u) {
    return u == "DET" || u == "ADJ" || u == "NOUN" || u == "PROPN" || u == "NUM";
  };
  auto nominal = [](const std::string& u) { return u == "NOUN" || u == "PROPN"; };

  const auto n = sentence.tokens.size();
  ChunkTags tags{std::vector<std::uint8_t>(n, 0)};
  for (const auto& t : sentence.tokens)
    if (!t.upos)
      throw ValidationError("sentence '" + sentence.id + "': token " + std::to_string(t.index) +
                            " has no UPOS tag");
  std::size_t i = 0;
  while (i < n) {
    if (!np_like(*sentence.tokens[i].upos)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::optional<std::size_t> last_nominal;
    while (j < n && np_like(*sentence.tokens[j].upos)) {
      if (nominal(*sentence.tokens[j].upos)) last_nominal = j;
      ++j;
    }
    if (last_nominal)
      for (std::size_t k = i; k <= *last_nominal; ++k) tags.inside_np[k] = 1;
    i = j;
  }
  return tags;
}

FeatureMap parse_features(std::string_view text) {
  FeatureMap out;
  detail::for_each_json_line(text, [&](const Json& rec, std::size_t line) {
    SentenceFeatures f;
    f.sentence_id = detail::require<std::string>(rec, "sentence_id", line);
    auto np = rec.find("inside_np");
    if (np == rec.end() || !np->is_array()) throw FormatError("missing array 'inside_np'", line);
    for (const auto& v : *np) {
      if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
        throw FormatError("'inside_np' values must be 0 or 1", line);
      f.inside_np.push_back(static_cast<std::uint8_t>(v.get<int>()));
    }
    auto heads = rec.find("dep_heads");
    if (heads == rec.end() || !heads->is_array()) throw FormatError("missing array 'dep_heads'", line);
    for (const auto& v : *heads) {
      if (v.is_null()) f.dep_heads.emplace_back();
      else if (v.is_number_integer()) f.dep_heads.emplace_back(v.get<int>());
      else throw FormatError("'dep_heads' values must be integers or null", line);
    }
    if (f.inside_np.size() != f.dep_heads.size())
      throw FormatError("'inside_np' and 'dep_heads' differ in length", line);
    if (!out.emplace(f.sentence_id, f).second)
      throw FormatError("duplicate sentence_id '" + f.sentence_id + "'", line);
  });
  return out;
}

FeatureMap load_features(const std::filesystem::path& path) {
  return parse_features(detail::read_file(path));
}

std::string serialize_features(const std::vector<SentenceFeatures>& records) {
  std::string out;
  for (const auto& f : records) {
    Json rec;
    rec["sentence_id"] = f.sentence_id;
    Json np = Json::array();
    for (auto b : f.inside_np) np.push_back(static_cast<int>(b));
    rec["inside_np"] = std::move(np);
    Json heads = Json::array();
    for (const auto& h : f.dep_heads) heads.push_back(h ? Json(*h) : Json(nullptr));
    rec["dep_heads"] = std::move(heads);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void write_features(const std::vector<SentenceFeatures>& records, const std::filesystem::path& path) {
  detail::write_file(path, serialize_features(records));
}

std::map<std::string, ChunkTags> load_chunk_tags(const std::filesystem::path& path) {
  std::map<std::string, ChunkTags> out;
  for (auto& [id, f] : load_features(path)) out.emplace(id, ChunkTags{f.inside_np});
  return out;
}

SentenceFeatures extract_features(const Sentence& sentence, const ChunkTags& chunks) {
  if (chunks.inside_np.size() != sentence.size())
    throw ValidationError("sentence '" + sentence.id + "': chunk tags have length " +
                          std::to_string(chunks.inside_np.size()) + ", expected " +
                          std::to_string(sentence.size()));
  SentenceFeatures f{sentence.id, chunks.inside_np, {}};
  for (const auto& t : sentence.tokens) f.dep_heads.push_back(t.head);
  return f;
}

void check_features(const Sentence& sentence, const SentenceFeatures& features) {
  if (features.inside_np.size() != sentence.size() || features.dep_heads.size() != sentence.size())
    throw ValidationError("sentence '" + sentence.id + "': feature record has length " +
                          std::to_string(features.inside_np.size()) + ", expected " +
                          std::to_string(sentence.size()));
}

std::map<std::string, DepDistanceMatrix> distance_matrices(const Corpus& corpus,
                                                          const FeatureMap* features, int cap) {
  std::map<std::string, DepDistanceMatrix> out;
  for (const auto& s : corpus.sentences) {
    if (features) {
      if (auto it = features->find(s.id); it != features->end()) {
        check_features(s, it->second);
        out.emplace(s.id, dep_distances(it->second.dep_heads, cap));
        continue;
      }
    }
    out.emplace(s.id, dep_distances(s, cap));
  }
  return out;
}

}  // namespace spanforge
