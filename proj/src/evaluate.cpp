#include "spanforge/evaluate.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "io_util.hpp"
#include "spanforge/error.hpp"

namespace spanforge {

using detail::Json;

long Ratio::percent_tenths() const {
  if (den == 0) return 0;
  // round_half_up(1000 * num / den)
  return static_cast<long>((2000 * num + den) / (2 * den));
}

std::string Ratio::percent_string() const {
  auto t = percent_tenths();
  return std::to_string(t / 10) + "." + std::to_string(t % 10);
}

std::string serialize_predictions(const Predictions& preds) {
  std::string out;
  for (const auto& sp : preds) {
    out += "{\"sentence_id\":";
    out += Json(sp.sentence_id).dump();
    out += ",\"mwes\":[";
    for (std::size_t k = 0; k < sp.mwes.size(); ++k) {
      if (k) out += ',';
      out += "{\"indices\":";
      out += Json(sp.mwes[k].token_indices).dump();
      out += ",\"score\":";
      out += detail::format_fixed(sp.mwes[k].score, 6);
      out += '}';
    }
    out += "]}\n";
  }
  return out;
}

void write_predictions(const Predictions& preds, const std::filesystem::path& path) {
  detail::write_file(path, serialize_predictions(preds));
}

Predictions parse_predictions(std::string_view text) {
  Predictions out;
  std::set<std::string> ids;
  detail::for_each_json_line(text, [&](const Json& rec, std::size_t line) {
    SentencePredictions sp;
    sp.sentence_id = detail::require<std::string>(rec, "sentence_id", line);
    if (!ids.insert(sp.sentence_id).second)
      throw FormatError("duplicate sentence_id '" + sp.sentence_id + "'", line);
    auto mwes = rec.find("mwes");
    if (mwes == rec.end() || !mwes->is_array()) throw FormatError("missing array 'mwes'", line);
    for (const auto& m : *mwes) {
      if (!m.is_object()) throw FormatError("prediction is not an object", line);
      PredictedMwe p;
      p.token_indices = detail::require<std::vector<int>>(m, "indices", line);
      if (auto sc = m.find("score"); sc != m.end()) {
        if (!sc->is_number()) throw FormatError("'score' must be a number", line);
        p.score = sc->get<double>();
      }
      if (p.token_indices.size() < 2) throw FormatError("prediction with fewer than 2 indices", line);
      for (std::size_t k = 1; k < p.token_indices.size(); ++k)
        if (p.token_indices[k] <= p.token_indices[k - 1])
          throw FormatError("prediction indices must be strictly increasing", line);
      sp.mwes.push_back(std::move(p));
    }
    out.push_back(std::move(sp));
  });
  return out;
}

Predictions load_predictions(const std::filesystem::path& path) {
  return parse_predictions(detail::read_file(path));
}

namespace {

// Per-sentence matching: flags[k] tells whether gold MWE k was matched, and
// pred_tp[k] whether prediction k was a true positive.
struct SentenceMatch {
  std::vector<bool> gold_matched;
  std::vector<bool> pred_tp;
};

SentenceMatch match_sentence(const std::vector<PredictedMwe>& preds, const Sentence& gold) {
  SentenceMatch m{std::vector<bool>(gold.mwes.size(), false), std::vector<bool>(preds.size(), false)};
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gold.mwes.size(); ++g) {
      if (m.gold_matched[g] || gold.mwes[g].token_indices != preds[p].token_indices) continue;
      m.gold_matched[g] = true;
      m.pred_tp[p] = true;
      break;
    }
  }
  return m;
}

// Calls fn(sentence, predictions, match) for every gold sentence; sentences
// without a prediction record are matched against an empty list.
template <typename Fn>
void for_each_match(const Predictions& pred, const Corpus& gold, Fn fn) {
  std::unordered_map<std::string, const Sentence*> by_id;
  for (const auto& s : gold.sentences) by_id.emplace(s.id, &s);
  std::unordered_map<std::string, const SentencePredictions*> pred_by_id;
  for (const auto& sp : pred) {
    auto it = by_id.find(sp.sentence_id);
    if (it == by_id.end())
      throw ValidationError("prediction for unknown sentence '" + sp.sentence_id + "'");
    for (const auto& m : sp.mwes)
      for (int i : m.token_indices)
        if (i < 0 || static_cast<std::size_t>(i) >= it->second->size())
          throw ValidationError("prediction index " + std::to_string(i) + " out of range in sentence '" +
                                sp.sentence_id + "'");
    if (!pred_by_id.emplace(sp.sentence_id, &sp).second)
      throw ValidationError("duplicate prediction record for sentence '" + sp.sentence_id + "'");
  }
  static const std::vector<PredictedMwe> kNone;
  for (const auto& s : gold.sentences) {
    auto it = pred_by_id.find(s.id);
    const auto& preds = it == pred_by_id.end() ? kNone : it->second->mwes;
    fn(s, preds, match_sentence(preds, s));
  }
}

}  // namespace

MatchCounts exact_match_counts(const Predictions& pred, const Corpus& gold) {
  MatchCounts c;
  for_each_match(pred, gold, [&](const Sentence&, const auto&, const SentenceMatch& m) {
    for (bool tp : m.pred_tp) tp ? ++c.tp : ++c.fp;
    for (bool g : m.gold_matched)
      if (!g) ++c.fn;
  });
  return c;
}

Prf micro_prf(const MatchCounts& c) {
  return {{c.tp, c.tp + c.fp}, {c.tp, c.tp + c.fn}, {2 * c.tp, 2 * c.tp + c.fp + c.fn}};
}

std::map<MweType, TypeRecall> type_recall(const Predictions& pred, const Corpus& gold) {
  std::map<MweType, TypeRecall> out;
  for_each_match(pred, gold, [&](const Sentence& s, const auto&, const SentenceMatch& m) {
    for (std::size_t g = 0; g < s.mwes.size(); ++g) {
      auto& tr = out[s.mwes[g].type];
      ++tr.support;
      if (m.gold_matched[g]) ++tr.matched;
    }
  });
  return out;
}

ContinuityMetrics continuity_metrics(const Predictions& pred, const Corpus& gold) {
  ContinuityMetrics out;
  for_each_match(pred, gold, [&](const Sentence& s, const auto& preds, const SentenceMatch& m) {
    for (std::size_t p = 0; p < preds.size(); ++p) {
      auto& bucket = is_contiguous(preds[p].token_indices) ? out.continuous : out.discontinuous;
      ++bucket.n_pred;
      if (m.pred_tp[p]) ++bucket.tp;
    }
    for (const auto& g : s.mwes) ++(g.continuous() ? out.continuous : out.discontinuous).n_gold;
  });
  return out;
}

EvalReport evaluate(const Predictions& pred, const Corpus& gold) {
  EvalReport r;
  r.counts = exact_match_counts(pred, gold);
  r.micro = micro_prf(r.counts);
  r.per_type_recall = type_recall(pred, gold);
  r.continuity = continuity_metrics(pred, gold);
  r.n_pred_continuous = r.continuity.continuous.n_pred;
  r.n_pred_discontinuous = r.continuity.discontinuous.n_pred;
  return r;
}

namespace {

Json ratio_json(const Ratio& r) {
  Json j;
  j["num"] = r.num;
  j["den"] = r.den;
  j["value"] = r.value();
  j["percent"] = r.percent();
  return j;
}

Json bucket_json(const ContinuityBucket& b) {
  Json j;
  j["precision"] = ratio_json(b.precision());
  j["recall"] = ratio_json(b.recall());
  j["f1"] = ratio_json(b.f1());
  j["tp"] = b.tp;
  j["n_pred"] = b.n_pred;
  j["support"] = b.n_gold;
  return j;
}

}  // namespace

std::string report_json(const EvalReport& r, int indent) {
  Json j;
  j["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}};
  j["micro"] = {{"precision", ratio_json(r.micro.precision)},
                {"recall", ratio_json(r.micro.recall)},
                {"f1", ratio_json(r.micro.f1)}};
  Json types = Json::object();
  for (const auto& [type, tr] : r.per_type_recall) {
    Json t = ratio_json(tr.recall());
    t["support"] = tr.support;
    types[std::string(to_string(type))] = std::move(t);
  }
  j["per_type_recall"] = std::move(types);
  j["continuity"] = {{"continuous", bucket_json(r.continuity.continuous)},
                     {"discontinuous", bucket_json(r.continuity.discontinuous)}};
  j["n_pred_continuous"] = r.n_pred_continuous;
  j["n_pred_discontinuous"] = r.n_pred_discontinuous;
  return j.dump(indent);
}

std::string report_table(const EvalReport& r) {
  std::ostringstream out;
  auto row = [&](const std::string& label, const std::string& value) {
    out << "  " << label << std::string(label.size() < 22 ? 22 - label.size() : 1, ' ') << value << '\n';
  };
  out << "Exact-match micro scores\n";
  row("precision", r.micro.precision.percent_string());
  row("recall", r.micro.recall.percent_string());
  row("f1", r.micro.f1.percent_string());
  row("tp / fp / fn", std::to_string(r.counts.tp) + " / " + std::to_string(r.counts.fp) + " / " +
                          std::to_string(r.counts.fn));
  out << "Recall by type (support)\n";
  for (const auto& [type, tr] : r.per_type_recall)
    row(std::string(to_string(type)), tr.recall().percent_string() + " (" + std::to_string(tr.support) + ")");
  out << "Continuity            P      R      F1     support  predicted\n";
  auto bucket = [&](const char* name, const ContinuityBucket& b) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-19s %-6s %-6s %-6s %-8zu %zu\n", name,
                  b.precision().percent_string().c_str(), b.recall().percent_string().c_str(),
                  b.f1().percent_string().c_str(), b.n_gold, b.n_pred);
    out << line;
  };
  bucket("continuous", r.continuity.continuous);
  bucket("discontinuous", r.continuity.discontinuous);
  return out.str();
}

}  // namespace spanforge
