#include "spanforge/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "io_util.hpp"
#include "spanforge/error.hpp"
#include "streusle_type_map_data.hpp"

namespace spanforge {

using detail::Json;

std::string_view to_string(MweType type) {
  switch (type) {
    case MweType::Noun: return "NOUN";
    case MweType::Verb: return "VERB";
    case MweType::ModConn: return "MOD/CONN";
    case MweType::Clause: return "CLAUSE";
    case MweType::Other: return "OTHER";
  }
  return "OTHER";
}

MweType parse_mwe_type(std::string_view label) {
  auto up = detail::to_upper_ascii(label);
  if (up == "NOUN") return MweType::Noun;
  if (up == "VERB") return MweType::Verb;
  if (up == "MOD/CONN" || up == "MOD_CONN") return MweType::ModConn;
  if (up == "CLAUSE") return MweType::Clause;
  if (up == "OTHER") return MweType::Other;
  throw ValidationError("unknown MWE type label '" + std::string(label) + "'");
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view label) {
  auto low = detail::to_lower_ascii(label);
  if (low == "train") return Split::Train;
  if (low == "dev" || low == "validation") return Split::Dev;
  if (low == "test") return Split::Test;
  throw ValidationError("unknown split '" + std::string(label) + "'");
}

CorpusFormat parse_corpus_format(std::string_view name) {
  auto low = detail::to_lower_ascii(name);
  if (low == "canonical") return CorpusFormat::Canonical;
  if (low == "coam") return CorpusFormat::Coam;
  if (low == "streusle") return CorpusFormat::Streusle;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

bool is_contiguous(const std::vector<int>& sorted_indices) {
  if (sorted_indices.empty()) return true;
  return sorted_indices.back() - sorted_indices.front() + 1 ==
         static_cast<int>(sorted_indices.size());
}

bool MweAnnotation::continuous() const { return is_contiguous(token_indices); }

int MweAnnotation::width() const {
  if (token_indices.empty()) return 0;
  return token_indices.back() - token_indices.front() + 1;
}

void validate(const Sentence& sentence) {
  const auto n = static_cast<int>(sentence.tokens.size());
  auto fail = [&](const std::string& msg) {
    throw ValidationError("sentence '" + sentence.id + "': " + msg);
  };
  if (sentence.id.empty()) fail("empty sentence id");
  for (int i = 0; i < n; ++i) {
    const auto& tok = sentence.tokens[static_cast<std::size_t>(i)];
    if (tok.index != i) fail("token " + std::to_string(i) + " has index " + std::to_string(tok.index));
    if (tok.head) {
      if (*tok.head < 0 || *tok.head >= n)
        fail("token " + std::to_string(i) + " head " + std::to_string(*tok.head) + " out of range");
      if (*tok.head == i) fail("token " + std::to_string(i) + " is its own head");
    }
  }
  std::set<std::vector<int>> seen;
  for (const auto& mwe : sentence.mwes) {
    const auto& idx = mwe.token_indices;
    if (idx.size() < 2) fail("MWE with fewer than 2 tokens");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= n) fail("MWE index " + std::to_string(idx[k]) + " out of range");
      if (k > 0 && idx[k] == idx[k - 1]) fail("duplicate MWE index " + std::to_string(idx[k]));
      if (k > 0 && idx[k] < idx[k - 1]) fail("MWE indices not strictly increasing");
    }
    if (!seen.insert(idx).second) fail("duplicate MWE annotation");
  }
}

void validate(const Corpus& corpus) {
  std::unordered_set<std::string> ids;
  for (const auto& s : corpus.sentences) {
    validate(s);
    if (!ids.insert(s.id).second) throw ValidationError("duplicate sentence id '" + s.id + "'");
  }
}

// ---------------------------------------------------------------------------
// STREUSLE type map

StreusleTypeMap::StreusleTypeMap(std::map<std::string, MweType, std::less<>> table)
    : table_(std::move(table)) {
  for (const auto& [label, type] : table_)
    if (type == MweType::Clause)
      throw ConfigError("STREUSLE label '" + label + "' may not map to CLAUSE");
}

namespace {

StreusleTypeMap parse_type_map(std::string_view text) {
  std::map<std::string, MweType, std::less<>> table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("expected label<TAB>type", line_no);
    auto label = line.substr(0, tab);
    MweType type;
    try {
      type = parse_mwe_type(line.substr(tab + 1));
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), line_no);
    }
    if (!table.emplace(label, type).second)
      throw FormatError("duplicate label '" + label + "'", line_no);
  }
  return StreusleTypeMap(std::move(table));
}

}  // namespace

const StreusleTypeMap& StreusleTypeMap::defaults() {
  static const StreusleTypeMap instance = parse_type_map(detail::kStreusleTypeMapTsv);
  return instance;
}

StreusleTypeMap StreusleTypeMap::load(const std::filesystem::path& path) {
  return parse_type_map(detail::read_file(path));
}

MweType StreusleTypeMap::map(std::string_view fine_label) const {
  auto it = table_.find(fine_label);
  if (it == table_.end())
    throw ValidationError("unknown STREUSLE category '" + std::string(fine_label) + "'");
  return it->second;
}

MweType map_streusle_type(std::string_view fine_label) {
  return StreusleTypeMap::defaults().map(fine_label);
}

// ---------------------------------------------------------------------------
// Readers

namespace {

std::optional<std::string> optional_string(const Json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw FormatError(std::string("field '") + key + "' must be a string", line);
  return it->get<std::string>();
}

std::optional<int> optional_int(const Json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer())
    throw FormatError(std::string("field '") + key + "' must be an integer or null", line);
  return it->get<int>();
}

Split record_split(const Json& rec, const LoadOptions& opt, std::size_t line) {
  if (auto s = optional_string(rec, "split", line)) {
    try {
      return parse_split(*s);
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), line);
    }
  }
  return opt.default_split.value_or(Split::Train);
}

// Validates and rethrows with the record's line number attached.
void validate_record(const Sentence& s, std::size_t line) {
  try {
    validate(s);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " (line " + std::to_string(line) + ")");
  }
}

MweType record_type(const Json& mwe, std::size_t line) {
  auto label = detail::require<std::string>(mwe, "type", line);
  try {
    return parse_mwe_type(label);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " (line " + std::to_string(line) + ")");
  }
}

Sentence parse_canonical_record(const Json& rec, const LoadOptions& opt, std::size_t line) {
  Sentence s;
  s.id = detail::require<std::string>(rec, "id", line);
  s.split = record_split(rec, opt, line);
  auto tokens = rec.find("tokens");
  if (tokens == rec.end() || !tokens->is_array()) throw FormatError("missing array 'tokens'", line);
  int i = 0;
  for (const auto& t : *tokens) {
    if (!t.is_object()) throw FormatError("token is not an object", line);
    Token tok;
    tok.index = i++;
    tok.surface = detail::require<std::string>(t, "surface", line);
    tok.lemma = optional_string(t, "lemma", line);
    tok.upos = optional_string(t, "upos", line);
    tok.head = optional_int(t, "head", line);
    tok.deprel = optional_string(t, "deprel", line);
    s.tokens.push_back(std::move(tok));
  }
  if (auto mwes = rec.find("mwes"); mwes != rec.end()) {
    if (!mwes->is_array()) throw FormatError("'mwes' must be an array", line);
    for (const auto& m : *mwes) {
      if (!m.is_object()) throw FormatError("MWE is not an object", line);
      MweAnnotation a;
      a.token_indices = detail::require<std::vector<int>>(m, "indices", line);
      a.type = record_type(m, line);
      s.mwes.push_back(std::move(a));
    }
  }
  validate_record(s, line);
  return s;
}

// CoAM-style: parallel arrays, CoNLL-style 1-based heads (0 = root), MWE token
// ids in any order.
Sentence parse_coam_record(const Json& rec, const LoadOptions& opt, std::size_t line) {
  Sentence s;
  s.id = detail::require<std::string>(rec, "id", line);
  s.split = record_split(rec, opt, line);
  auto words = detail::require<std::vector<std::string>>(rec, "tokens", line);
  auto column = [&](const char* key) -> std::optional<Json> {
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) return std::nullopt;
    if (!it->is_array() || it->size() != words.size())
      throw FormatError(std::string("'") + key + "' must be an array parallel to 'tokens'", line);
    return *it;
  };
  auto lemmas = column("lemmas");
  auto upos = column("upos");
  auto heads = column("heads");
  auto deprels = column("deprels");
  for (std::size_t i = 0; i < words.size(); ++i) {
    Token tok;
    tok.index = static_cast<int>(i);
    tok.surface = words[i];
    try {
      if (lemmas) tok.lemma = (*lemmas)[i].get<std::string>();
      if (upos) tok.upos = (*upos)[i].get<std::string>();
      if (deprels) tok.deprel = (*deprels)[i].get<std::string>();
      if (heads) {
        const auto& h = (*heads)[i];
        if (!h.is_null()) {
          int v = h.get<int>();
          if (v > 0) tok.head = v - 1;
          else if (v < 0) throw FormatError("negative head", line);
        }
      }
    } catch (const Json::exception&) {
      throw FormatError("token column has the wrong type", line);
    }
    s.tokens.push_back(std::move(tok));
  }
  if (auto mwes = rec.find("mwes"); mwes != rec.end()) {
    if (!mwes->is_array()) throw FormatError("'mwes' must be an array", line);
    for (const auto& m : *mwes) {
      if (!m.is_object()) throw FormatError("MWE is not an object", line);
      MweAnnotation a;
      a.token_indices = detail::require<std::vector<int>>(m, "token_ids", line);
      std::sort(a.token_indices.begin(), a.token_indices.end());
      a.type = record_type(m, line);
      s.mwes.push_back(std::move(a));
    }
  }
  validate_record(s, line);
  return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return out;
}

std::optional<Split> split_from_filename(const std::filesystem::path& path) {
  auto stem = detail::to_lower_ascii(path.filename().string());
  if (stem.find("train") != std::string::npos) return Split::Train;
  if (stem.find("dev") != std::string::npos) return Split::Dev;
  if (stem.find("test") != std::string::npos) return Split::Test;
  return std::nullopt;
}

// .conllulex: 19 tab-separated columns. Columns used: ID(0) FORM(1) LEMMA(2)
// UPOS(3) HEAD(6) DEPREL(7) SMWE(10) LEXCAT(11). Strong MWEs only; the fine
// label is the LEXCAT of the MWE's first token.
Corpus parse_streusle(std::string_view text, const std::filesystem::path& path,
                      const LoadOptions& opt) {
  const auto& types = opt.type_map ? *opt.type_map : StreusleTypeMap::defaults();
  const Split split = opt.default_split.value_or(split_from_filename(path).value_or(Split::Train));
  Corpus corpus;
  corpus.name = path.stem().string();

  Sentence cur;
  std::map<int, std::vector<std::pair<int, int>>> groups;  // mwe id -> (position, token)
  std::map<int, std::string> group_label;
  std::size_t start_line = 0;
  bool open = false;

  auto flush = [&] {
    if (!open) return;
    if (cur.id.empty()) cur.id = corpus.name + "-" + std::to_string(corpus.sentences.size() + 1);
    cur.split = split;
    for (auto& [gid, members] : groups) {
      std::sort(members.begin(), members.end());
      MweAnnotation a;
      for (auto [pos, tok] : members) a.token_indices.push_back(tok);
      std::sort(a.token_indices.begin(), a.token_indices.end());
      auto lab = group_label.find(gid);
      if (lab == group_label.end())
        throw FormatError("MWE " + std::to_string(gid) + " has no LEXCAT on its first token",
                          start_line);
      try {
        a.type = types.map(lab->second);
      } catch (const ValidationError& e) {
        throw ValidationError(std::string(e.what()) + " (line " + std::to_string(start_line) + ")");
      }
      cur.mwes.push_back(std::move(a));
    }
    validate_record(cur, start_line);
    corpus.sentences.push_back(std::move(cur));
    cur = Sentence{};
    groups.clear();
    group_label.clear();
    open = false;
  };

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (!open) {
      open = true;
      start_line = line_no;
    }
    if (line[0] == '#') {
      constexpr std::string_view key = "# sent_id = ";
      if (line.rfind(key, 0) == 0) cur.id = line.substr(key.size());
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() < 12) throw FormatError("expected at least 12 tab-separated columns", line_no);
    const auto& id = cols[0];
    if (id.find_first_of("-.") != std::string::npos) continue;  // multiword tokens, empty nodes
    int conll_id = 0;
    try {
      conll_id = std::stoi(id);
    } catch (const std::exception&) {
      throw FormatError("bad token id '" + id + "'", line_no);
    }
    Token tok;
    tok.index = static_cast<int>(cur.tokens.size());
    if (conll_id != tok.index + 1) throw FormatError("token ids must be 1..n in order", line_no);
    tok.surface = cols[1];
    if (cols[2] != "_") tok.lemma = cols[2];
    if (cols[3] != "_") tok.upos = cols[3];
    if (cols[6] != "_") {
      int h = 0;
      try {
        h = std::stoi(cols[6]);
      } catch (const std::exception&) {
        throw FormatError("bad head '" + cols[6] + "'", line_no);
      }
      if (h > 0) tok.head = h - 1;
    }
    if (cols[7] != "_") tok.deprel = cols[7];
    if (cols[10] != "_" && !cols[10].empty()) {
      auto colon = cols[10].find(':');
      if (colon == std::string::npos) throw FormatError("bad SMWE value '" + cols[10] + "'", line_no);
      int gid = 0, pos = 0;
      try {
        gid = std::stoi(cols[10].substr(0, colon));
        pos = std::stoi(cols[10].substr(colon + 1));
      } catch (const std::exception&) {
        throw FormatError("bad SMWE value '" + cols[10] + "'", line_no);
      }
      groups[gid].emplace_back(pos, tok.index);
      if (pos == 1 && cols[11] != "_") group_label[gid] = cols[11];
    }
    cur.tokens.push_back(std::move(tok));
  }
  flush();
  return corpus;
}

}  // namespace

Corpus parse_canonical(std::string_view text, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::unordered_set<std::string> ids;
  LoadOptions opt;
  detail::for_each_json_line(text, [&](const Json& rec, std::size_t line) {
    auto s = parse_canonical_record(rec, opt, line);
    if (!ids.insert(s.id).second)
      throw ValidationError("duplicate sentence id '" + s.id + "' (line " + std::to_string(line) + ")");
    corpus.sentences.push_back(std::move(s));
  });
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, const LoadOptions& options) {
  auto text = detail::read_file(path);
  Corpus corpus;
  switch (format) {
    case CorpusFormat::Streusle:
      corpus = parse_streusle(text, path, options);
      break;
    case CorpusFormat::Canonical:
    case CorpusFormat::Coam: {
      corpus.name = path.stem().string();
      std::unordered_set<std::string> ids;
      detail::for_each_json_line(text, [&](const Json& rec, std::size_t line) {
        auto s = format == CorpusFormat::Canonical ? parse_canonical_record(rec, options, line)
                                                   : parse_coam_record(rec, options, line);
        if (!ids.insert(s.id).second)
          throw ValidationError("duplicate sentence id '" + s.id + "' (line " + std::to_string(line) + ")");
        corpus.sentences.push_back(std::move(s));
      });
      break;
    }
  }
  validate(corpus);
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.sentences) {
    Json rec;
    rec["id"] = s.id;
    rec["split"] = std::string(to_string(s.split));
    Json tokens = Json::array();
    for (const auto& t : s.tokens) {
      Json tok;
      tok["surface"] = t.surface;
      if (t.lemma) tok["lemma"] = *t.lemma;
      if (t.upos) tok["upos"] = *t.upos;
      tok["head"] = t.head ? Json(*t.head) : Json(nullptr);
      if (t.deprel) tok["deprel"] = *t.deprel;
      tokens.push_back(std::move(tok));
    }
    rec["tokens"] = std::move(tokens);
    Json mwes = Json::array();
    for (const auto& m : s.mwes) {
      Json mwe;
      mwe["indices"] = m.token_indices;
      mwe["type"] = std::string(to_string(m.type));
      mwes.push_back(std::move(mwe));
    }
    rec["mwes"] = std::move(mwes);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  detail::write_file(path, serialize_corpus(corpus));
}

std::size_t CorpusStats::total_sentences() const {
  std::size_t n = 0;
  for (const auto& [split, counts] : per_split) n += counts.sentences;
  return n;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats st;
  for (const auto& s : corpus.sentences) {
    auto& counts = st.per_split[s.split];
    ++counts.sentences;
    counts.mwes += s.mwes.size();
    for (const auto& m : s.mwes) {
      ++st.type_histogram[m.type];
      if (m.continuous()) ++st.continuous;
      else ++st.discontinuous;
      ++st.span_length_histogram[m.width()];
      ++st.member_count_histogram[static_cast<int>(m.token_indices.size())];
    }
  }
  return st;
}

}  // namespace spanforge
