// spanforge: command-line front end for the MWE toolkit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spanforge/augment.hpp"
#include "spanforge/corpus.hpp"
#include "spanforge/error.hpp"
#include "spanforge/evaluate.hpp"
#include "spanforge/features.hpp"
#include "spanforge/pipeline.hpp"
#include "spanforge/projection.hpp"
#include "spanforge/reconstruct.hpp"
#include "spanforge/scoring.hpp"
#include "spanforge/tune.hpp"

namespace sf = spanforge;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,
  kConfig = 3,
  kFormat = 4,
  kValidation = 5,
  kIntegrity = 6,
  kStructure = 7,
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw sf::ConfigError("cannot write " + path);
  out << text;
}

sf::Corpus load_canonical(const std::string& path) {
  return sf::load_corpus(path, sf::CorpusFormat::Canonical);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPANFORGE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw sf::ConfigError(std::string("SPANFORGE_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

struct ReconFlags {
  int max_width = 13;
  int min_members = 2;
  int max_members = 6;
  int dep_reject_above = 4;
  std::string overlap = "greedy";
  bool no_dep_filter = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--max-width", max_width, "Maximum span width")->capture_default_str();
    cmd->add_option("--min-members", min_members)->capture_default_str();
    cmd->add_option("--max-members", max_members)->capture_default_str();
    cmd->add_option("--dep-reject-above", dep_reject_above,
                    "Reject discontinuous candidates with a consecutive-member distance above this")
        ->capture_default_str();
    cmd->add_option("--overlap", overlap, "greedy | all")->capture_default_str();
    cmd->add_flag("--no-dep-filter", no_dep_filter, "Skip the dependency-distance filter");
  }

  sf::ReconstructionConfig config() const {
    sf::ReconstructionConfig cfg;
    cfg.max_width = max_width;
    cfg.min_members = min_members;
    cfg.max_members = max_members;
    cfg.dep_reject_above = dep_reject_above;
    cfg.overlap = sf::parse_overlap_policy(overlap);
    cfg.dep_filter = !no_dep_filter;
    sf::validate(cfg);
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spanforge: START/END/INSIDE multiword-expression toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sf::kToolkitVersion);
  unsigned jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for parallel stages (0 = all cores)")->capture_default_str();

  // convert
  auto* convert = app.add_subcommand("convert", "Convert a CoAM- or STREUSLE-style corpus to canonical form");
  std::string conv_from, conv_in, conv_out, conv_type_map, conv_split;
  convert->add_option("--from", conv_from, "coam | streusle")->required()->check(CLI::IsMember({"coam", "streusle"}));
  convert->add_option("--in", conv_in)->required();
  convert->add_option("--out", conv_out)->required();
  convert->add_option("--type-map", conv_type_map, "STREUSLE label -> type TSV (defaults to the built-in table)");
  convert->add_option("--split", conv_split, "Split for records without one: train | dev | test");

  // stats
  auto* stats = app.add_subcommand("stats", "Print corpus statistics");
  std::string stats_in;
  stats->add_option("--in", stats_in)->required();

  // project
  auto* project = app.add_subcommand("project", "Write a versioned, checksummed projection artifact");
  std::string proj_in, proj_version, proj_out;
  project->add_option("--in", proj_in)->required();
  project->add_option("--version", proj_version)->required();
  project->add_option("--out", proj_out)->required();

  // verify
  auto* verify = app.add_subcommand("verify", "Check a projection artifact against its checksum");
  std::string verify_in;
  verify->add_option("--in", verify_in)->required();

  // features
  auto* features = app.add_subcommand("features", "Write the feature file (NP chunk tags and dependency heads)");
  std::string feat_in, feat_out, feat_chunks;
  bool feat_heuristic = false;
  features->add_option("--in", feat_in)->required();
  features->add_option("--out", feat_out)->required();
  features->add_flag("--heuristic-chunks", feat_heuristic, "Tag NP chunks from UPOS runs");
  features->add_option("--chunks", feat_chunks, "Take inside_np tags from an existing feature file");

  // score
  auto* score = app.add_subcommand("score", "Score a corpus with the lexicon baseline");
  std::string score_train, score_in, score_out;
  score->add_option("--train", score_train)->required();
  score->add_option("--in", score_in)->required();
  score->add_option("--out", score_out)->required();

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "Turn token probabilities into predicted MWEs");
  std::string rec_probs, rec_corpus, rec_features, rec_out;
  sf::Thresholds rec_t;
  ReconFlags rec_flags;
  recon->add_option("--probs", rec_probs)->required();
  recon->add_option("--corpus", rec_corpus)->required();
  recon->add_option("--features", rec_features, "Feature file supplying dependency heads");
  recon->add_option("--tau-start", rec_t.start)->required();
  recon->add_option("--tau-end", rec_t.end)->required();
  recon->add_option("--tau-inside", rec_t.inside)->required();
  recon->add_option("--out", rec_out)->required();
  rec_flags.add_to(recon);

  // tune
  auto* tune = app.add_subcommand("tune", "Grid-search the three thresholds on a development split");
  std::string tune_corpus, tune_probs, tune_features, tune_out, tune_grid = "0.2:0.6:0.05";
  std::optional<double> tune_dev_fraction;
  std::optional<std::uint64_t> tune_seed;
  ReconFlags tune_flags;
  tune->add_option("--corpus", tune_corpus)->required();
  tune->add_option("--probs", tune_probs)->required();
  tune->add_option("--features", tune_features);
  tune->add_option("--grid", tune_grid, "lo:hi:step")->capture_default_str();
  tune->add_option("--dev-fraction", tune_dev_fraction, "Carve a seeded dev slice from train");
  tune->add_option("--seed", tune_seed, "Seed for --dev-fraction (default: $SPANFORGE_SEED or 0)");
  tune->add_option("--out", tune_out, "Trace (TSV)")->required();
  tune_flags.add_to(tune);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Exact-match evaluation of predictions against gold");
  std::string eval_pred, eval_gold, eval_out;
  evaluate->add_option("--pred", eval_pred)->required();
  evaluate->add_option("--gold", eval_gold)->required();
  evaluate->add_option("--out", eval_out, "JSON report; a text table is written to OUT.txt")->required();

  // augment
  auto* augment = app.add_subcommand("augment", "Oversample or lexically substitute training sentences");
  std::string aug_strategy, aug_lexicon, aug_in, aug_out;
  double aug_ratio = 0.3;
  std::optional<std::uint64_t> aug_seed;
  augment->add_option("--strategy", aug_strategy, "oversample | lexsub")->required();
  augment->add_option("--ratio", aug_ratio)->required();
  augment->add_option("--seed", aug_seed, "Default: $SPANFORGE_SEED or 0");
  augment->add_option("--lexicon", aug_lexicon, "Substitution lexicon (lexsub)");
  augment->add_option("--in", aug_in)->required();
  augment->add_option("--out", aug_out)->required();

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a JSON run manifest");
  std::string manifest_path;
  pipeline->add_option("manifest", manifest_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*convert) {
      sf::LoadOptions opt;
      std::optional<sf::StreusleTypeMap> types;
      if (!conv_type_map.empty()) {
        types = sf::StreusleTypeMap::load(conv_type_map);
        opt.type_map = &*types;
      }
      if (!conv_split.empty()) opt.default_split = sf::parse_split(conv_split);
      auto corpus = sf::load_corpus(conv_in, sf::parse_corpus_format(conv_from), opt);
      sf::write_corpus(corpus, conv_out);
      std::cerr << "converted " << corpus.sentences.size() << " sentences\n";
    } else if (*stats) {
      auto st = sf::corpus_stats(load_canonical(stats_in));
      std::cout << "sentences\t" << st.total_sentences() << "\nmwes\t" << st.total_mwes() << '\n';
      for (const auto& [split, c] : st.per_split)
        std::cout << "split " << sf::to_string(split) << "\t" << c.sentences << " sentences\t" << c.mwes
                  << " mwes\n";
      for (const auto& [type, n] : st.type_histogram) std::cout << "type " << sf::to_string(type) << '\t' << n << '\n';
      std::cout << "continuous\t" << st.continuous << "\ndiscontinuous\t" << st.discontinuous << '\n';
      for (const auto& [w, n] : st.span_length_histogram) std::cout << "width " << w << '\t' << n << '\n';
    } else if (*project) {
      auto corpus = load_canonical(proj_in);
      std::size_t collisions = 0;
      for (const auto& s : corpus.sentences) {
        auto c = sf::boundary_collisions(s);
        if (c) std::cerr << "warning: sentence '" << s.id << "' has " << c << " collided boundaries\n";
        collisions += c;
      }
      if (collisions) std::cerr << "warning: " << collisions << " collided boundaries in total\n";
      auto artifact = sf::write_artifact(corpus, proj_version, proj_out);
      std::cout << artifact.checksum << '\n';
    } else if (*verify) {
      auto artifact = sf::read_artifact(verify_in);
      std::cout << artifact.checksum << '\t' << artifact.projections.size() << " projections\tversion "
                << artifact.version << '\n';
    } else if (*features) {
      auto corpus = load_canonical(feat_in);
      std::map<std::string, sf::ChunkTags> supplied;
      if (!feat_chunks.empty()) supplied = sf::load_chunk_tags(feat_chunks);
      else if (!feat_heuristic)
        throw sf::ConfigError("no chunk source: pass --heuristic-chunks or --chunks PATH");
      std::vector<sf::SentenceFeatures> records;
      for (const auto& s : corpus.sentences) {
        sf::ChunkTags tags;
        if (!feat_chunks.empty()) {
          auto it = supplied.find(s.id);
          if (it == supplied.end()) throw sf::ValidationError("no chunk tags for sentence '" + s.id + "'");
          tags = it->second;
        } else {
          tags = sf::heuristic_chunk_tags(s);
        }
        sf::dep_distances(s);  // rejects head cycles before they reach the file
        records.push_back(sf::extract_features(s, tags));
      }
      sf::write_features(records, feat_out);
    } else if (*score) {
      auto lexicon = sf::build_lexicon(load_canonical(score_train));
      sf::write_probabilities(sf::baseline_score(load_canonical(score_in), lexicon), score_out);
    } else if (*recon) {
      auto corpus = load_canonical(rec_corpus);
      auto probs = sf::load_probabilities(rec_probs);
      sf::check_probabilities(corpus, probs);
      sf::validate(rec_t);
      auto cfg = rec_flags.config();
      std::optional<sf::FeatureMap> feats;
      if (!rec_features.empty()) feats = sf::load_features(rec_features);
      std::map<std::string, sf::DepDistanceMatrix> matrices;
      if (cfg.dep_filter) matrices = sf::distance_matrices(corpus, feats ? &*feats : nullptr);
      sf::write_predictions(sf::reconstruct_corpus(corpus, probs, rec_t, cfg, &matrices), rec_out);
    } else if (*tune) {
      auto corpus = load_canonical(tune_corpus);
      auto probs = sf::load_probabilities(tune_probs);
      sf::Corpus dev{corpus.name, {}};
      for (const auto& s : corpus.sentences)
        if (s.split == sf::Split::Dev) dev.sentences.push_back(s);
      if (tune_dev_fraction) {
        sf::Corpus train{corpus.name, {}};
        for (const auto& s : corpus.sentences)
          if (s.split == sf::Split::Train) train.sentences.push_back(s);
        dev = sf::carve_dev(train, *tune_dev_fraction, resolve_seed(tune_seed)).second;
      }
      if (dev.sentences.empty()) throw sf::ConfigError("no dev sentences: add a dev split or pass --dev-fraction");
      auto cfg = tune_flags.config();
      std::optional<sf::FeatureMap> feats;
      if (!tune_features.empty()) feats = sf::load_features(tune_features);
      std::map<std::string, sf::DepDistanceMatrix> matrices;
      if (cfg.dep_filter) matrices = sf::distance_matrices(dev, feats ? &*feats : nullptr);
      auto result = sf::grid_search(dev, probs, sf::ThresholdGrid::parse(tune_grid), cfg, &matrices, jobs);
      write_text(tune_out, sf::trace_tsv(result));
      std::cout << "best tau_start=" << result.best.start << " tau_end=" << result.best.end
                << " tau_inside=" << result.best.inside << " f1=" << result.best_f1.percent_string() << '\n';
    } else if (*evaluate) {
      auto report = sf::evaluate(sf::load_predictions(eval_pred), load_canonical(eval_gold));
      write_text(eval_out, sf::report_json(report) + "\n");
      auto table = sf::report_table(report);
      write_text(eval_out + ".txt", table);
      std::cout << table;
    } else if (*augment) {
      sf::AugmentConfig cfg{sf::parse_augment_strategy(aug_strategy), aug_ratio, resolve_seed(aug_seed)};
      sf::validate(cfg);
      if (!sf::is_standard_ratio(cfg.ratio))
        std::cerr << "note: ratio " << cfg.ratio << " is outside the 0.10/0.20/0.30/0.40 settings\n";
      std::optional<sf::SubstitutionLexicon> lexicon;
      if (!aug_lexicon.empty()) lexicon = sf::SubstitutionLexicon::load(aug_lexicon);
      auto result = sf::augment(load_canonical(aug_in), cfg, lexicon ? &*lexicon : nullptr);
      sf::write_corpus(result.corpus, aug_out);
      std::cerr << "added " << result.added << " sentences";
      if (cfg.strategy == sf::AugmentStrategy::LexicalSubstitution) std::cerr << ", skipped " << result.skipped;
      std::cerr << '\n';
    } else if (*pipeline) {
      auto manifest = sf::load_manifest(manifest_path);
      sf::RunOptions opt;
      opt.jobs = jobs;
      opt.fallback_seed = resolve_seed(std::nullopt);
      auto summary = sf::run_pipeline(manifest, opt);
      std::cout << sf::report_table(summary.report);
    }
  } catch (const sf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const sf::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const sf::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const sf::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return kIntegrity;
  } catch (const sf::StructureError& e) {
    std::cerr << "structure error: " << e.what() << '\n';
    return kStructure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kOk;
}
