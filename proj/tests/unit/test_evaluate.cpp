#include "doctest.h"

#include "../support.hpp"
#include "spanforge/error.hpp"
#include "spanforge/evaluate.hpp"

using namespace sftest;

namespace {

Predictions one(const std::string& id, std::vector<std::vector<int>> sets) {
  SentencePredictions sp{id, {}};
  for (auto& s : sets) sp.mwes.push_back({std::move(s), 1.0});
  return {sp};
}

// Long-division rounding, independent of Ratio's closed form.
long tenths_oracle(std::size_t num, std::size_t den) {
  if (den == 0) return 0;
  const auto scaled = 1000 * num;
  long q = static_cast<long>(scaled / den);
  if (2 * (scaled % den) >= den) ++q;
  return q;
}

}  // namespace

TEST_CASE("exact match counting") {
  Corpus gold{"g", {looked_up()}};
  SUBCASE("identical sets") {
    auto c = exact_match_counts(one("s1", {{0, 3}}), gold);
    CHECK(c == MatchCounts{1, 0, 0});
  }
  SUBCASE("boundary mismatch is both a false positive and a false negative") {
    auto c = exact_match_counts(one("s1", {{0, 2, 3}}), gold);
    CHECK(c == MatchCounts{0, 1, 1});
  }
  SUBCASE("no predictions") {
    auto s = make_sentence("s2", {"a", "b", "c", "d"}, {{{0, 1}, MweType::Noun}, {{2, 3}, MweType::Noun}});
    auto c = exact_match_counts({}, Corpus{"g", {s}});
    CHECK(c == MatchCounts{0, 0, 2});
  }
  SUBCASE("duplicate predictions count once") {
    auto c = exact_match_counts(one("s1", {{0, 3}, {0, 3}}), gold);
    CHECK(c == MatchCounts{1, 1, 0});
  }
  SUBCASE("unknown sentence id") {
    CHECK_THROWS_AS(exact_match_counts(one("nope", {{0, 1}}), gold), ValidationError);
  }
  SUBCASE("index outside the sentence") {
    CHECK_THROWS_AS(exact_match_counts(one("s1", {{0, 9}}), gold), ValidationError);
  }
}

TEST_CASE("micro scores with one-decimal rounding") {
  auto prf = micro_prf({268, 119, 113});
  CHECK(prf.precision.percent_string() == "69.3");
  CHECK(prf.recall.percent_string() == "70.3");
  CHECK(prf.f1.percent_string() == "69.8");
  CHECK(prf.precision.den == 387);
  CHECK(prf.recall.den == 381);

  auto empty = micro_prf({0, 0, 0});
  CHECK(empty.precision.percent() == 0.0);
  CHECK(empty.recall.percent() == 0.0);
  CHECK(empty.f1.percent() == 0.0);

  auto perfect = micro_prf({5, 0, 0});
  CHECK(perfect.precision.percent_string() == "100.0");
  CHECK(perfect.recall.percent_string() == "100.0");
  CHECK(perfect.f1.percent_string() == "100.0");
}

TEST_CASE("F1 equals the harmonic mean of precision and recall") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    MatchCounts c{rng() % 50 + 1, rng() % 50, rng() % 50};
    auto prf = micro_prf(c);
    double p = prf.precision.value(), r = prf.recall.value();
    CHECK(prf.f1.value() == doctest::Approx(2 * p * r / (p + r)));
  }
}

TEST_CASE("property: percent rounding matches long division") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5000; ++trial) {
    std::size_t den = rng() % 2000;
    std::size_t num = den ? rng() % (den + 1) : 0;
    CHECK(Ratio{num, den}.percent_tenths() == tenths_oracle(num, den));
  }
  CHECK(Ratio{1, 8}.percent_string() == "12.5");
  CHECK(Ratio{1, 16}.percent_string() == "6.3");
  CHECK(Ratio{6, 7}.percent_string() == "85.7");
}

TEST_CASE("type recall") {
  Sentence s = make_sentence("c", std::vector<std::string>(20, "w"));
  for (int k = 0; k < 7; ++k) s.mwes.push_back({{2 * k, 2 * k + 1}, MweType::Clause});
  Predictions pred = one("c", {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}, {10, 11}});
  auto tr = type_recall(pred, Corpus{"g", {s}});
  REQUIRE(tr.count(MweType::Clause));
  CHECK(tr.at(MweType::Clause).support == 7);
  CHECK(tr.at(MweType::Clause).recall().percent_string() == "85.7");
  CHECK(tr.count(MweType::Noun) == 0);

  auto all = type_recall(one("s1", {{0, 3}}), Corpus{"g", {looked_up()}});
  CHECK(all.at(MweType::Verb).recall().percent_string() == "100.0");
}

TEST_CASE("continuity buckets") {
  auto s = make_sentence("c", {"a", "b", "c", "d"}, {{{0, 2}, MweType::Verb}});
  auto cm = continuity_metrics(one("c", {{0, 1, 2}, {0, 2}}), Corpus{"g", {s}});
  CHECK(cm.continuous.n_pred == 1);
  CHECK(cm.continuous.tp == 0);
  CHECK(cm.discontinuous.n_pred == 1);
  CHECK(cm.discontinuous.tp == 1);
  CHECK(cm.discontinuous.precision().percent_string() == "100.0");
  CHECK(cm.discontinuous.recall().percent_string() == "100.0");
  CHECK(cm.continuous.n_gold == 0);
}

TEST_CASE("property: counts equal a nested-loop matcher") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    Corpus gold{"g", {}};
    Predictions pred;
    for (int k = 0; k < 3; ++k) {
      const int n = 6;
      auto s = make_sentence("s" + std::to_string(k), std::vector<std::string>(n, "w"));
      std::set<std::vector<int>> seen;
      auto random_set = [&] {
        std::vector<int> idx;
        while (idx.size() < 2) {
          idx.clear();
          for (int i = 0; i < n; ++i)
            if (rng() % 3 == 0) idx.push_back(i);
        }
        return idx;
      };
      for (int g = 0; g < 3; ++g) {
        auto idx = random_set();
        if (seen.insert(idx).second) s.mwes.push_back({idx, MweType::Other});
      }
      SentencePredictions sp{s.id, {}};
      for (int p = 0; p < 3; ++p) {
        // Reuse gold sets often so that matches happen.
        if (rng() % 2 && !s.mwes.empty()) sp.mwes.push_back({s.mwes[rng() % s.mwes.size()].token_indices, 0.5});
        else sp.mwes.push_back({random_set(), 0.5});
      }
      if (rng() % 4) pred.push_back(sp);
      gold.sentences.push_back(s);
    }

    std::size_t tp = 0, n_pred = 0, n_gold = 0;
    for (const auto& s : gold.sentences) {
      n_gold += s.mwes.size();
      const SentencePredictions* sp = nullptr;
      for (const auto& x : pred)
        if (x.sentence_id == s.id) sp = &x;
      if (!sp) continue;
      n_pred += sp->mwes.size();
      for (const auto& g : s.mwes) {
        bool hit = false;
        for (const auto& p : sp->mwes) hit = hit || p.token_indices == g.token_indices;
        tp += hit;
      }
    }
    auto c = exact_match_counts(pred, gold);
    CHECK(c.tp == tp);
    CHECK(c.fp == n_pred - tp);
    CHECK(c.fn == n_gold - tp);
  }
}

TEST_CASE("prediction file round trip") {
  TempDir dir("preds");
  Predictions p = {{"a", {{{0, 3}, 0.81}, {{4, 5}, 1.0}}}, {"b", {}}};
  write_predictions(p, dir / "p.jsonl");
  CHECK(load_predictions(dir / "p.jsonl") == p);
  CHECK_THROWS_AS(parse_predictions(R"({"sentence_id":"a","mwes":[{"indices":[3,1]}]})"), FormatError);
  CHECK_THROWS_AS(parse_predictions("{\"sentence_id\":\"a\",\"mwes\":[]}\n{\"sentence_id\":\"a\",\"mwes\":[]}\n"),
                  FormatError);
}

TEST_CASE("report rendering") {
  auto r = evaluate(one("s1", {{0, 3}}), Corpus{"g", {looked_up()}});
  auto json = report_json(r);
  CHECK(json.find("\"per_type_recall\"") != std::string::npos);
  CHECK(json.find("\"VERB\"") != std::string::npos);
  auto table = report_table(r);
  CHECK(table.find("100.0") != std::string::npos);
  CHECK(r.n_pred_discontinuous == 1);
  CHECK(r.n_pred_continuous == 0);
}
