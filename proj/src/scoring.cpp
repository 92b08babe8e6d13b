#include "spanforge/scoring.hpp"

#include <algorithm>
#include <set>

#include "io_util.hpp"
#include "spanforge/error.hpp"

namespace spanforge {

using detail::Json;

void validate(const TokenProbabilities& probs) {
  const auto n = probs.p_start.size();
  if (probs.p_end.size() != n || probs.p_inside.size() != n)
    throw ValidationError("sentence '" + probs.sentence_id + "': probability sequences differ in length");
  auto check = [&](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!(v[i] >= 0.0 && v[i] <= 1.0))
        throw ValidationError("sentence '" + probs.sentence_id + "': " + name + "[" +
                              std::to_string(i) + "] = " + std::to_string(v[i]) +
                              " outside [0, 1]");
  };
  check(probs.p_start, "p_start");
  check(probs.p_end, "p_end");
  check(probs.p_inside, "p_inside");
}

void MweLexicon::add(LexiconKey key, std::size_t count) {
  if (count == 0) return;
  const auto m = key.words.size();
  if (m < 2 || m > static_cast<std::size_t>(kMaxLexiconMembers)) return;
  entries_[std::move(key)] += count;
}

std::size_t MweLexicon::count(const LexiconKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second;
}

std::string lexicon_word(const Token& token) {
  return detail::to_lower_ascii(token.lemma ? *token.lemma : token.surface);
}

MweLexicon build_lexicon(const Corpus& train) {
  MweLexicon lex;
  for (const auto& s : train.sentences) {
    for (const auto& m : s.mwes) {
      LexiconKey key;
      for (int i : m.token_indices) key.words.push_back(lexicon_word(s.tokens[static_cast<std::size_t>(i)]));
      key.gapped = !m.continuous();
      lex.add(std::move(key));
    }
  }
  return lex;
}

TokenProbabilities baseline_score(const Sentence& sentence, const MweLexicon& lexicon) {
  const auto n = sentence.size();
  TokenProbabilities p{sentence.id, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                       std::vector<double>(n, 0.0)};
  std::vector<std::string> words;
  words.reserve(n);
  for (const auto& t : sentence.tokens) words.push_back(lexicon_word(t));

  auto mark = [&](const std::vector<std::size_t>& members) {
    p.p_start[members.front()] = 1.0;
    p.p_end[members.back()] = 1.0;
    for (std::size_t k = 1; k + 1 < members.size(); ++k) p.p_inside[members[k]] = 1.0;
  };

  std::vector<std::size_t> members;
  for (const auto& [key, count] : lexicon.entries()) {
    const auto m = key.words.size();
    if (m > n) continue;
    for (std::size_t first = 0; first < n; ++first) {
      if (words[first] != key.words[0]) continue;
      members.assign(1, first);
      if (!key.gapped) {
        if (first + m > n) break;
        bool ok = true;
        for (std::size_t k = 1; k < m && ok; ++k) ok = words[first + k] == key.words[k];
        if (!ok) continue;
        for (std::size_t k = 1; k < m; ++k) members.push_back(first + k);
      } else {
        // Leftmost occurrence of each following member within the width limit.
        const auto limit = std::min(n, first + static_cast<std::size_t>(kMaxBaselineWidth));
        std::size_t pos = first + 1;
        for (std::size_t k = 1; k < m; ++k) {
          while (pos < limit && words[pos] != key.words[k]) ++pos;
          if (pos >= limit) break;
          members.push_back(pos++);
        }
        if (members.size() != m) continue;
      }
      mark(members);
    }
  }
  return p;
}

ProbabilityMap baseline_score(const Corpus& corpus, const MweLexicon& lexicon) {
  ProbabilityMap out;
  for (const auto& s : corpus.sentences) out.emplace(s.id, baseline_score(s, lexicon));
  return out;
}

namespace {

void append_array(std::string& out, const std::vector<double>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += detail::format_fixed(values[i], 6);
  }
  out += ']';
}

std::vector<double> read_array(const Json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_array()) throw FormatError(std::string("missing array '") + key + "'", line);
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw FormatError(std::string("'") + key + "' values must be numbers", line);
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string serialize_probabilities(const ProbabilityMap& probs) {
  std::string out;
  for (const auto& [id, p] : probs) {
    out += "{\"sentence_id\":";
    out += Json(id).dump();
    out += ",\"p_start\":";
    append_array(out, p.p_start);
    out += ",\"p_end\":";
    append_array(out, p.p_end);
    out += ",\"p_inside\":";
    append_array(out, p.p_inside);
    out += "}\n";
  }
  return out;
}

void write_probabilities(const ProbabilityMap& probs, const std::filesystem::path& path) {
  detail::write_file(path, serialize_probabilities(probs));
}

ProbabilityMap parse_probabilities(std::string_view text) {
  ProbabilityMap out;
  detail::for_each_json_line(text, [&](const Json& rec, std::size_t line) {
    TokenProbabilities p;
    p.sentence_id = detail::require<std::string>(rec, "sentence_id", line);
    p.p_start = read_array(rec, "p_start", line);
    p.p_end = read_array(rec, "p_end", line);
    p.p_inside = read_array(rec, "p_inside", line);
    try {
      validate(p);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " (line " + std::to_string(line) + ")");
    }
    if (!out.emplace(p.sentence_id, p).second)
      throw FormatError("duplicate sentence_id '" + p.sentence_id + "'", line);
  });
  return out;
}

ProbabilityMap load_probabilities(const std::filesystem::path& path) {
  return parse_probabilities(detail::read_file(path));
}

void check_probabilities(const Corpus& corpus, const ProbabilityMap& probs, bool allow_extra) {
  std::set<std::string> ids;
  for (const auto& s : corpus.sentences) {
    ids.insert(s.id);
    auto it = probs.find(s.id);
    if (it == probs.end()) throw ValidationError("no probabilities for sentence '" + s.id + "'");
    validate(it->second);
    if (it->second.size() != s.size())
      throw ValidationError("sentence '" + s.id + "': probabilities have length " +
                            std::to_string(it->second.size()) + ", expected " + std::to_string(s.size()));
  }
  if (allow_extra) return;
  for (const auto& [id, p] : probs)
    if (!ids.count(id)) throw ValidationError("probabilities reference unknown sentence '" + id + "'");
}

}  // namespace spanforge
