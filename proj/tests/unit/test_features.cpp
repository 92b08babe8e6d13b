#include "doctest.h"

#include "../support.hpp"
#include "spanforge/error.hpp"

using namespace sftest;

namespace {

Sentence tagged(const std::vector<std::string>& upos) {
  std::vector<std::string> words(upos.size(), "w");
  auto s = make_sentence("t", words);
  for (std::size_t i = 0; i < upos.size(); ++i) s.tokens[i].upos = upos[i];
  return s;
}

}  // namespace

TEST_CASE("two-edge chain") {
  std::vector<std::optional<int>> heads{std::nullopt, 0, 1};
  auto d = dep_distances(heads);
  CHECK(d.at(0, 2) == 2);
  CHECK(d.at(2, 0) == 2);
  CHECK(d.at(1, 1) == 0);
}

TEST_CASE("eight-token chain is capped") {
  auto d = dep_distances(chain_heads(8));
  CHECK(d.at(0, 7) == 5);
  CHECK(d.at(0, 4) == 4);
  CHECK(d.cap() == 5);
}

TEST_CASE("disconnected components sit at the cap") {
  std::vector<std::optional<int>> heads{std::nullopt, 0, std::nullopt, 2};
  auto d = dep_distances(heads);
  CHECK(d.at(0, 1) == 1);
  CHECK(d.at(1, 3) == 5);
  CHECK(d.at(0, 2) == 5);
  auto oracle = floyd_distances(heads, 5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(d.at(i, j) == oracle[i][j]);
}

TEST_CASE("head cycles are structural errors") {
  std::vector<std::optional<int>> heads{1, 2, 0, std::nullopt};
  CHECK_THROWS_AS(dep_distances(heads), StructureError);
  try {
    dep_distances(heads);
  } catch (const StructureError& e) {
    CHECK(std::string(e.what()).find("cycle") != std::string::npos);
  }
  std::vector<std::optional<int>> self{0};
  CHECK_THROWS_AS(dep_distances(self), ValidationError);
  std::vector<std::optional<int>> out_of_range{std::nullopt, 7};
  CHECK_THROWS_AS(dep_distances(out_of_range), ValidationError);
}

TEST_CASE("empty and single-token sentences") {
  std::vector<std::optional<int>> none;
  CHECK(dep_distances(none).size() == 0);
  std::vector<std::optional<int>> one{std::nullopt};
  CHECK(dep_distances(one).at(0, 0) == 0);
}

TEST_CASE("property: distances equal Floyd-Warshall on random forests") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = std::uniform_int_distribution<int>(1, 15)(rng);
    auto heads = random_forest(rng, n);
    int cap = trial % 4 == 0 ? std::uniform_int_distribution<int>(1, 8)(rng) : 5;
    auto d = dep_distances(heads, cap);
    auto oracle = floyd_distances(heads, cap);
    bool same = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) same &= d.at(i, j) == oracle[i][j];
    CHECK(same);
  }
}

TEST_CASE("mean distance") {
  std::vector<std::optional<int>> two{std::nullopt, 0};
  CHECK(mean_dep_distance(dep_distances(two), 0) == doctest::Approx(1.0));
  CHECK(mean_dep_distance(dep_distances(chain_heads(3)), 0) == doctest::Approx(1.5));
  std::vector<std::optional<int>> isolated(4);
  CHECK(mean_dep_distance(dep_distances(isolated), 2) == doctest::Approx(5.0));
  std::vector<std::optional<int>> one{std::nullopt};
  CHECK_THROWS_AS(mean_dep_distance(dep_distances(one), 0), ValidationError);
}

TEST_CASE("heuristic chunker") {
  CHECK(heuristic_chunk_tags(tagged({"DET", "NOUN", "VERB"})).inside_np == std::vector<std::uint8_t>{1, 1, 0});
  CHECK(heuristic_chunk_tags(tagged({"VERB", "VERB", "VERB"})).inside_np == std::vector<std::uint8_t>{0, 0, 0});
  CHECK(heuristic_chunk_tags(tagged({"DET", "ADJ", "NOUN", "NUM", "VERB", "ADJ"})).inside_np ==
        std::vector<std::uint8_t>{1, 1, 1, 0, 0, 0});
  CHECK(heuristic_chunk_tags(tagged({"PROPN", "PROPN", "AUX", "DET", "ADJ"})).inside_np ==
        std::vector<std::uint8_t>{1, 1, 0, 0, 0});
  auto untagged = make_sentence("u", {"a", "b"});
  CHECK_THROWS_AS(heuristic_chunk_tags(untagged), ValidationError);
}

TEST_CASE("feature file tags are returned unchanged") {
  TempDir dir("features");
  spit(dir / "f.jsonl", R"({"sentence_id":"sm","inside_np":[0,1,1,0],"dep_heads":[null,0,1,2]})"
                        "\n");
  auto tags = load_chunk_tags(dir / "f.jsonl");
  CHECK(tags.at("sm").inside_np == std::vector<std::uint8_t>{0, 1, 1, 0});
}

TEST_CASE("feature extraction and file round trip") {
  auto s = make_sentence("q", {"the", "stock", "market", "fell"});
  s.tokens[1].head = 2;
  s.tokens[2].head = 3;
  s.tokens[0].head = 2;
  auto f = extract_features(s, ChunkTags{{1, 1, 1, 0}});
  CHECK(f.inside_np.size() == 4);
  CHECK(f.dep_heads.size() == 4);
  CHECK(f.dep_heads[3] == std::nullopt);
  TempDir dir("features");
  write_features({f}, dir / "f.jsonl");
  auto back = load_features(dir / "f.jsonl");
  CHECK(back.at("q") == f);
  CHECK_THROWS_AS(extract_features(s, ChunkTags{{1, 1}}), ValidationError);

  write_features({}, dir / "empty.jsonl");
  CHECK(slurp(dir / "empty.jsonl").empty());
}

TEST_CASE("feature file schema errors") {
  CHECK_THROWS_AS(parse_features(R"({"sentence_id":"a","inside_np":[0,2],"dep_heads":[null,0]})"), FormatError);
  CHECK_THROWS_AS(parse_features(R"({"sentence_id":"a","inside_np":[0],"dep_heads":[null,0]})"), FormatError);
  CHECK_THROWS_AS(parse_features(R"({"sentence_id":"a","inside_np":[0]})"), FormatError);
  auto s = make_sentence("a", {"x", "y", "z"});
  SentenceFeatures short_rec{"a", {0, 0}, {std::nullopt, 0}};
  CHECK_THROWS_AS(check_features(s, short_rec), ValidationError);
}

TEST_CASE("distance matrices prefer feature-file heads") {
  auto s = make_sentence("a", {"x", "y", "z"});
  s.tokens[1].head = 0;
  s.tokens[2].head = 1;
  Corpus c{"c", {s, make_sentence("b", {"p", "q"})}};
  FeatureMap fm;
  fm["a"] = SentenceFeatures{"a", {0, 0, 0}, {std::nullopt, std::nullopt, std::nullopt}};
  auto own = distance_matrices(c, nullptr);
  CHECK(own.at("a").at(0, 2) == 2);
  auto from_file = distance_matrices(c, &fm);
  CHECK(from_file.at("a").at(0, 2) == 5);
  CHECK(from_file.at("b").at(0, 1) == 5);
}
