#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>

#include "../support.hpp"
#include "spanforge/projection.hpp"

using namespace sftest;

namespace {

int run(const std::string& args, const TempDir& dir) {
  auto cmd = std::string(SPANFORGE_CLI) + " " + args + " > " + (dir / "stdout").string() + " 2> " +
             (dir / "stderr").string();
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

const char* kLookedUp =
    R"({"id":"s1","split":"test","tokens":[{"surface":"looked"},{"surface":"the"},{"surface":"information"},)"
    R"({"surface":"up"}],"mwes":[{"indices":[0,3],"type":"VERB"}]})"
    "\n";

}  // namespace

TEST_CASE("exit codes") {
  TempDir dir("cli");
  CHECK(run("", dir) == 2);
  CHECK(run("stats", dir) == 2);
  CHECK(run("frobnicate", dir) == 2);
  CHECK(run("stats --in " + q(dir / "missing.jsonl"), dir) == 3);

  spit(dir / "bad.jsonl", "{\"id\":\n");
  CHECK(run("stats --in " + q(dir / "bad.jsonl"), dir) == 4);

  spit(dir / "dup.jsonl", R"({"id":"a","tokens":[{"surface":"x"},{"surface":"y"}],"mwes":[{"indices":[1,1],"type":"NOUN"}]})"
                          "\n");
  CHECK(run("stats --in " + q(dir / "dup.jsonl"), dir) == 5);

  spit(dir / "ok.jsonl", kLookedUp);
  REQUIRE(run("project --in " + q(dir / "ok.jsonl") + " --version v1 --out " + q(dir / "a.json"), dir) == 0);
  CHECK(run("verify --in " + q(dir / "a.json"), dir) == 0);
  CHECK(slurp(dir / "stdout").find("1 projections\tversion v1") != std::string::npos);
  auto text = slurp(dir / "a.json");
  auto pos = text.find("\"start\":[1");
  REQUIRE(pos != std::string::npos);
  text[pos + 9] = '0';
  spit(dir / "a.json", text);
  CHECK(run("verify --in " + q(dir / "a.json"), dir) == 6);

  spit(dir / "cycle.jsonl",
       R"({"id":"c","tokens":[{"surface":"a","upos":"NOUN","head":1},{"surface":"b","upos":"NOUN","head":0}],"mwes":[]})"
       "\n");
  CHECK(run("features --heuristic-chunks --in " + q(dir / "cycle.jsonl") + " --out " + q(dir / "f.jsonl"), dir) == 7);
  CHECK_FALSE(std::filesystem::exists(dir / "f.jsonl"));
}

TEST_CASE("score, reconstruct and evaluate from the command line") {
  TempDir dir("cli");
  auto train = synthetic_corpus(16, 0, 4);
  auto test = synthetic_corpus(0, 6, 5);
  write_corpus(train, dir / "train.jsonl");
  write_corpus(test, dir / "test.jsonl");
  REQUIRE(run("score --train " + q(dir / "train.jsonl") + " --in " + q(dir / "test.jsonl") + " --out " +
                  q(dir / "p.jsonl"),
              dir) == 0);
  REQUIRE(run("reconstruct --probs " + q(dir / "p.jsonl") + " --corpus " + q(dir / "test.jsonl") +
                  " --tau-start 0.5 --tau-end 0.5 --tau-inside 0.5 --out " + q(dir / "pred.jsonl"),
              dir) == 0);
  REQUIRE(run("evaluate --pred " + q(dir / "pred.jsonl") + " --gold " + q(dir / "test.jsonl") + " --out " +
                  q(dir / "eval.json"),
              dir) == 0);
  CHECK(std::filesystem::exists(dir / "eval.json"));
  CHECK(slurp(dir / "eval.json.txt") == slurp(dir / "stdout"));
  CHECK(slurp(dir / "stdout").find("100.0") != std::string::npos);

  CHECK(run("reconstruct --probs " + q(dir / "p.jsonl") + " --corpus " + q(dir / "test.jsonl") +
                " --tau-start 1.5 --tau-end 0.5 --tau-inside 0.5 --out " + q(dir / "x.jsonl"),
            dir) == 3);
}

TEST_CASE("tune prints the chosen triple") {
  TempDir dir("cli");
  auto c = synthetic_corpus(40, 0, 6);
  write_corpus(c, dir / "c.jsonl");
  REQUIRE(run("score --train " + q(dir / "c.jsonl") + " --in " + q(dir / "c.jsonl") + " --out " + q(dir / "p.jsonl"),
              dir) == 0);
  REQUIRE(run("tune --corpus " + q(dir / "c.jsonl") + " --probs " + q(dir / "p.jsonl") +
                  " --dev-fraction 0.2 --seed 3 --grid 0.2:0.6:0.2 --out " + q(dir / "trace.tsv"),
              dir) == 0);
  CHECK(slurp(dir / "stdout").rfind("best tau_start=", 0) == 0);
  auto trace = slurp(dir / "trace.tsv");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 28);
  CHECK(run("tune --corpus " + q(dir / "c.jsonl") + " --probs " + q(dir / "p.jsonl") + " --out " + q(dir / "t.tsv"),
            dir) == 3);
}

TEST_CASE("pipeline from the command line") {
  TempDir dir("cli");
  write_corpus(synthetic_corpus(40, 10, 8), dir / "corpus.jsonl");
  spit(dir / "run.json", R"({"corpus":"corpus.jsonl","grid":"0.2:0.6:0.1","output_dir":"out","seed":4})");
  REQUIRE(run("pipeline " + q(dir / "run.json"), dir) == 0);
  auto report = slurp(dir / "out" / "report.json");
  auto preds = slurp(dir / "out" / "predictions.jsonl");
  REQUIRE(run("--jobs 3 pipeline " + q(dir / "run.json"), dir) == 0);
  CHECK(slurp(dir / "out" / "report.json") == report);
  CHECK(slurp(dir / "out" / "predictions.jsonl") == preds);

  spit(dir / "bad.json", R"({"corpus":"gone.jsonl","output_dir":"out2"})");
  CHECK(run("pipeline " + q(dir / "bad.json"), dir) == 3);
  CHECK(slurp(dir / "stderr").find("stage 'inputs'") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "out2"));
}
