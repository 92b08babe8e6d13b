#include "spanforge/pipeline.hpp"

#include <set>

#include "io_util.hpp"
#include "spanforge/digest.hpp"
#include "spanforge/error.hpp"
#include "spanforge/features.hpp"
#include "spanforge/projection.hpp"
#include "spanforge/scoring.hpp"

namespace spanforge {

using detail::Json;

namespace {

template <typename F>
auto run_stage(const char* name, F&& fn) {
  try {
    return fn();
  } catch (Error& e) {
    e.add_context(std::string("stage '") + name + "'");
    throw;
  } catch (const std::filesystem::filesystem_error& e) {
    throw ConfigError(std::string("stage '") + name + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T field(const Json& obj, const char* key, const char* where) {
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string(where) + ": field '" + key + "' is missing or has the wrong type");
  }
}

}  // namespace

std::vector<std::pair<std::string, std::filesystem::path>> RunManifest::inputs() const {
  std::vector<std::pair<std::string, std::filesystem::path>> out;
  auto rel = [&](const std::filesystem::path& p) {
    return p.lexically_relative(base_dir).generic_string();
  };
  out.emplace_back(rel(corpus), corpus);
  if (probabilities) out.emplace_back(rel(*probabilities), *probabilities);
  if (features) out.emplace_back(rel(*features), *features);
  if (substitution_lexicon) out.emplace_back(rel(*substitution_lexicon), *substitution_lexicon);
  return out;
}

RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  constexpr const char* kWhere = "manifest";

  RunManifest m;
  m.base_dir = base_dir;
  m.raw = std::string(text);
  m.corpus = resolve(base_dir, field<std::string>(j, "corpus", kWhere));
  if (j.contains("corpus_format")) m.corpus_format = parse_corpus_format(field<std::string>(j, "corpus_format", kWhere));
  if (j.contains("probabilities") && !j["probabilities"].is_null())
    m.probabilities = resolve(base_dir, field<std::string>(j, "probabilities", kWhere));
  if (j.contains("features") && !j["features"].is_null())
    m.features = resolve(base_dir, field<std::string>(j, "features", kWhere));
  if (j.contains("thresholds") && !j["thresholds"].is_null()) {
    const auto& t = j["thresholds"];
    m.thresholds = Thresholds{field<double>(t, "start", "thresholds"), field<double>(t, "end", "thresholds"),
                              field<double>(t, "inside", "thresholds")};
    validate(*m.thresholds);
  }
  if (j.contains("grid")) m.grid = ThresholdGrid::parse(field<std::string>(j, "grid", kWhere));
  if (j.contains("dev_fraction")) m.dev_fraction = field<double>(j, "dev_fraction", kWhere);
  if (j.contains("reconstruction")) {
    const auto& r = j["reconstruction"];
    auto& cfg = m.reconstruction;
    if (r.contains("max_width")) cfg.max_width = field<int>(r, "max_width", "reconstruction");
    if (r.contains("min_members")) cfg.min_members = field<int>(r, "min_members", "reconstruction");
    if (r.contains("max_members")) cfg.max_members = field<int>(r, "max_members", "reconstruction");
    if (r.contains("dep_reject_above")) cfg.dep_reject_above = field<int>(r, "dep_reject_above", "reconstruction");
    if (r.contains("overlap")) cfg.overlap = parse_overlap_policy(field<std::string>(r, "overlap", "reconstruction"));
    if (r.contains("dep_filter")) cfg.dep_filter = field<bool>(r, "dep_filter", "reconstruction");
    validate(cfg);
  }
  if (j.contains("seed") && !j["seed"].is_null()) m.seed = field<std::uint64_t>(j, "seed", kWhere);
  if (j.contains("augment") && !j["augment"].is_null()) {
    const auto& a = j["augment"];
    AugmentConfig cfg;
    cfg.strategy = parse_augment_strategy(field<std::string>(a, "strategy", "augment"));
    cfg.ratio = field<double>(a, "ratio", "augment");
    validate(cfg);
    m.augment = cfg;
    if (a.contains("lexicon")) m.substitution_lexicon = resolve(base_dir, field<std::string>(a, "lexicon", "augment"));
    if (cfg.strategy == AugmentStrategy::LexicalSubstitution && !m.substitution_lexicon)
      throw ConfigError("augment: lexical substitution needs 'lexicon'");
  }
  m.output_dir = resolve(base_dir, field<std::string>(j, "output_dir", kWhere));
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_manifest(detail::read_file(path), base);
}

RunSummary run_pipeline(const RunManifest& m, const RunOptions& options) {
  const std::uint64_t seed = m.seed.value_or(options.fallback_seed);

  run_stage("inputs", [&] {
    for (const auto& [name, path] : m.inputs())
      if (!std::filesystem::is_regular_file(path)) throw ConfigError("input file not found: " + path.string());
    return 0;
  });

  struct Loaded {
    Corpus corpus;
    std::optional<ProbabilityMap> probs;
    std::optional<FeatureMap> features;
    std::optional<SubstitutionLexicon> lexicon;
    std::vector<std::pair<std::string, std::string>> digests;
  };
  auto in = run_stage("load", [&] {
    Loaded l;
    l.corpus = load_corpus(m.corpus, m.corpus_format);
    if (m.probabilities) l.probs = load_probabilities(*m.probabilities);
    if (m.features) l.features = load_features(*m.features);
    if (m.substitution_lexicon) l.lexicon = SubstitutionLexicon::load(*m.substitution_lexicon);
    for (const auto& [name, path] : m.inputs()) l.digests.emplace_back(name, file_sha256(path));
    return l;
  });

  auto by_split = [&](Split split) {
    Corpus c{in.corpus.name, {}};
    for (const auto& s : in.corpus.sentences)
      if (s.split == split) c.sentences.push_back(s);
    return c;
  };
  Corpus train = by_split(Split::Train);
  Corpus dev = by_split(Split::Dev);
  Corpus test = by_split(Split::Test);

  std::optional<AugmentResult> augmented;
  if (m.augment) {
    augmented = run_stage("augment", [&] {
      auto cfg = *m.augment;
      cfg.seed = seed;
      return augment(train, cfg, in.lexicon ? &*in.lexicon : nullptr);
    });
  }

  const bool tuning = !m.thresholds;
  run_stage("split", [&] {
    if (test.sentences.empty()) throw ConfigError("corpus has no test sentences");
    if (tuning && dev.sentences.empty()) {
      auto [rest, carved] = carve_dev(train, m.dev_fraction, seed);
      train = std::move(rest);
      dev = std::move(carved);
    }
    return 0;
  });

  // Scored sentences: dev (when tuning) followed by test.
  Corpus scored{in.corpus.name, {}};
  if (tuning) scored.sentences = dev.sentences;
  scored.sentences.insert(scored.sentences.end(), test.sentences.begin(), test.sentences.end());

  auto probs = run_stage("score", [&] {
    if (in.probs) {
      check_probabilities(scored, *in.probs, true);
      ProbabilityMap subset;
      for (const auto& s : scored.sentences) subset.emplace(s.id, in.probs->at(s.id));
      return subset;
    }
    // Augmented copies only raise lexicon counts; carved dev sentences are
    // excluded so tuning sees held-out data.
    Corpus lexicon_source = train;
    if (augmented) {
      std::set<std::string> dev_ids;
      for (const auto& s : dev.sentences) dev_ids.insert(s.id);
      lexicon_source.sentences.clear();
      for (const auto& s : augmented->corpus.sentences) {
        auto base = s.id.substr(0, s.id.find('#'));
        if (!dev_ids.count(base)) lexicon_source.sentences.push_back(s);
      }
    }
    return baseline_score(scored, build_lexicon(lexicon_source));
  });

  auto matrices = run_stage("features", [&] {
    return distance_matrices(scored, in.features ? &*in.features : nullptr);
  });

  std::optional<TuneResult> tuned;
  Thresholds thresholds = m.thresholds.value_or(Thresholds{});
  if (tuning) {
    tuned = run_stage("tune", [&] {
      return grid_search(dev, probs, m.grid, m.reconstruction, &matrices, options.jobs);
    });
    thresholds = tuned->best;
  }

  auto predictions = run_stage("reconstruct", [&] {
    return reconstruct_corpus(test, probs, thresholds, m.reconstruction, &matrices);
  });
  auto report = run_stage("evaluate", [&] { return evaluate(predictions, test); });

  RunSummary summary{thresholds, report, {}};
  run_stage("write", [&] {
    namespace fs = std::filesystem;
    fs::create_directories(m.output_dir);
    std::vector<std::pair<std::string, std::string>> written;  // name, digest
    auto emit = [&](const std::string& name, const std::string& data) {
      detail::write_file(m.output_dir / name, data);
      written.emplace_back(name, sha256_hex(data));
      summary.outputs.push_back(m.output_dir / name);
    };

    Json provenance;
    provenance["toolkit_version"] = kToolkitVersion;
    provenance["seed"] = seed;
    Json inputs = Json::array();
    for (const auto& [name, digest] : in.digests) inputs.push_back({{"path", name}, {"sha256", digest}});
    provenance["inputs"] = inputs;

    Json thr = {{"start", thresholds.start}, {"end", thresholds.end}, {"inside", thresholds.inside}};

    emit("probabilities.jsonl", serialize_probabilities(probs));
    emit("predictions.jsonl", serialize_predictions(predictions));
    if (tuned) emit("tune_trace.tsv", trace_tsv(*tuned));
    emit("train_projections.json", serialize_artifact(build_artifact(train, kToolkitVersion)));
    if (augmented) emit("train_augmented.jsonl", serialize_corpus(augmented->corpus));

    Json rep;
    rep["provenance"] = provenance;
    rep["thresholds"] = thr;
    rep["tuned"] = tuning;
    rep["report"] = Json::parse(report_json(report, -1));
    emit("report.json", rep.dump(2) + "\n");
    emit("report.txt", report_table(report));

    Json echo;
    echo["provenance"] = provenance;
    echo["manifest"] = Json::parse(m.raw);
    Json outputs = Json::array();
    for (const auto& [name, digest] : written) outputs.push_back({{"path", name}, {"sha256", digest}});
    echo["outputs"] = outputs;
    detail::write_file(m.output_dir / "manifest.json", echo.dump(2) + "\n");
    summary.outputs.push_back(m.output_dir / "manifest.json");
    return 0;
  });
  return summary;
}

}  // namespace spanforge
