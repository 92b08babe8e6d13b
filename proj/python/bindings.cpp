#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spanforge/augment.hpp"
#include "spanforge/digest.hpp"
#include "spanforge/error.hpp"
#include "spanforge/evaluate.hpp"
#include "spanforge/features.hpp"
#include "spanforge/pipeline.hpp"
#include "spanforge/projection.hpp"
#include "spanforge/reconstruct.hpp"
#include "spanforge/scoring.hpp"
#include "spanforge/tune.hpp"

namespace py = pybind11;
namespace sf = spanforge;

namespace {

py::dict prf_dict(const sf::Prf& prf) {
  py::dict d;
  d["precision"] = prf.precision.percent();
  d["recall"] = prf.recall.percent();
  d["f1"] = prf.f1.percent();
  return d;
}

sf::Predictions to_predictions(const std::map<std::string, std::vector<std::vector<int>>>& spans) {
  sf::Predictions out;
  for (const auto& [id, sets] : spans) {
    sf::SentencePredictions sp{id, {}};
    for (const auto& s : sets) sp.mwes.push_back({s, 1.0});
    out.push_back(std::move(sp));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_spanforge, m) {
  m.doc() = "MWE identification toolkit: projection, reconstruction, tuning and evaluation";
  m.attr("__version__") = sf::kToolkitVersion;

  auto base = py::register_exception<sf::Error>(m, "SpanforgeError");
  py::register_exception<sf::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<sf::FormatError>(m, "FormatError", base.ptr());
  py::register_exception<sf::ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<sf::IntegrityError>(m, "IntegrityError", base.ptr());
  py::register_exception<sf::StructureError>(m, "StructureError", base.ptr());

  py::enum_<sf::MweType>(m, "MweType")
      .value("NOUN", sf::MweType::Noun)
      .value("VERB", sf::MweType::Verb)
      .value("MOD_CONN", sf::MweType::ModConn)
      .value("CLAUSE", sf::MweType::Clause)
      .value("OTHER", sf::MweType::Other);
  py::enum_<sf::Split>(m, "Split")
      .value("TRAIN", sf::Split::Train)
      .value("DEV", sf::Split::Dev)
      .value("TEST", sf::Split::Test);
  py::enum_<sf::OverlapPolicy>(m, "OverlapPolicy")
      .value("GREEDY", sf::OverlapPolicy::GreedyNonOverlap)
      .value("ALLOW_ALL", sf::OverlapPolicy::AllowAll);

  py::class_<sf::Token>(m, "Token")
      .def(py::init([](std::string surface, std::optional<int> head, std::optional<std::string> upos) {
             sf::Token t;
             t.surface = std::move(surface);
             t.head = head;
             t.upos = std::move(upos);
             return t;
           }),
           py::arg("surface"), py::arg("head") = py::none(), py::arg("upos") = py::none())
      .def_readwrite("index", &sf::Token::index)
      .def_readwrite("surface", &sf::Token::surface)
      .def_readwrite("lemma", &sf::Token::lemma)
      .def_readwrite("upos", &sf::Token::upos)
      .def_readwrite("head", &sf::Token::head)
      .def_readwrite("deprel", &sf::Token::deprel);

  py::class_<sf::MweAnnotation>(m, "MweAnnotation")
      .def(py::init([](std::vector<int> indices, sf::MweType type) { return sf::MweAnnotation{std::move(indices), type}; }),
           py::arg("token_indices"), py::arg("type") = sf::MweType::Other)
      .def_readwrite("token_indices", &sf::MweAnnotation::token_indices)
      .def_readwrite("type", &sf::MweAnnotation::type)
      .def_property_readonly("continuous", &sf::MweAnnotation::continuous);

  py::class_<sf::Sentence>(m, "Sentence")
      .def(py::init([](std::string id, std::vector<sf::Token> tokens, std::vector<sf::MweAnnotation> mwes,
                       sf::Split split) {
             for (std::size_t i = 0; i < tokens.size(); ++i) tokens[i].index = static_cast<int>(i);
             sf::Sentence s{std::move(id), std::move(tokens), std::move(mwes), split};
             sf::validate(s);
             return s;
           }),
           py::arg("id"), py::arg("tokens"), py::arg("mwes") = std::vector<sf::MweAnnotation>{},
           py::arg("split") = sf::Split::Train)
      .def_readwrite("id", &sf::Sentence::id)
      .def_readwrite("tokens", &sf::Sentence::tokens)
      .def_readwrite("mwes", &sf::Sentence::mwes)
      .def_readwrite("split", &sf::Sentence::split)
      .def("__len__", &sf::Sentence::size);

  py::class_<sf::Corpus>(m, "Corpus")
      .def(py::init([](std::string name, std::vector<sf::Sentence> sentences) {
             sf::Corpus c{std::move(name), std::move(sentences)};
             sf::validate(c);
             return c;
           }),
           py::arg("name"), py::arg("sentences"))
      .def_readwrite("name", &sf::Corpus::name)
      .def_readwrite("sentences", &sf::Corpus::sentences)
      .def("__len__", [](const sf::Corpus& c) { return c.sentences.size(); });

  py::class_<sf::Thresholds>(m, "Thresholds")
      .def(py::init<>())
      .def(py::init([](double s, double e, double i) { return sf::Thresholds{s, e, i}; }), py::arg("start"),
           py::arg("end"), py::arg("inside"))
      .def_readwrite("start", &sf::Thresholds::start)
      .def_readwrite("end", &sf::Thresholds::end)
      .def_readwrite("inside", &sf::Thresholds::inside)
      .def("__repr__", [](const sf::Thresholds& t) {
        return "Thresholds(" + py::repr(py::float_(t.start)).cast<std::string>() + ", " +
               py::repr(py::float_(t.end)).cast<std::string>() + ", " +
               py::repr(py::float_(t.inside)).cast<std::string>() + ")";
      });

  py::class_<sf::ReconstructionConfig>(m, "ReconstructionConfig")
      .def(py::init<>())
      .def_readwrite("max_width", &sf::ReconstructionConfig::max_width)
      .def_readwrite("min_members", &sf::ReconstructionConfig::min_members)
      .def_readwrite("max_members", &sf::ReconstructionConfig::max_members)
      .def_readwrite("dep_reject_above", &sf::ReconstructionConfig::dep_reject_above)
      .def_readwrite("overlap", &sf::ReconstructionConfig::overlap)
      .def_readwrite("dep_filter", &sf::ReconstructionConfig::dep_filter);

  m.def(
      "load_corpus",
      [](const std::filesystem::path& path, const std::string& format) {
        return sf::load_corpus(path, sf::parse_corpus_format(format));
      },
      py::arg("path"), py::arg("format") = "canonical");
  m.def("write_corpus", &sf::write_corpus, py::arg("corpus"), py::arg("path"));
  m.def("map_streusle_type", [](const std::string& label) { return sf::map_streusle_type(label); });

  m.def(
      "project",
      [](const sf::Sentence& s) {
        auto p = sf::project(s);
        py::dict d;
        d["start"] = std::vector<int>(p.start.begin(), p.start.end());
        d["end"] = std::vector<int>(p.end.begin(), p.end.end());
        d["inside"] = std::vector<int>(p.inside.begin(), p.inside.end());
        return d;
      },
      py::arg("sentence"));
  m.def(
      "write_artifact",
      [](const sf::Corpus& c, const std::string& version, const std::filesystem::path& out) {
        return sf::write_artifact(c, version, out).checksum;
      },
      py::arg("corpus"), py::arg("version"), py::arg("path"));
  m.def(
      "verify_artifact", [](const std::filesystem::path& path) { return sf::read_artifact(path).checksum; },
      py::arg("path"));

  m.def(
      "dep_distances",
      [](const std::vector<std::optional<int>>& heads, int cap) {
        auto d = sf::dep_distances(heads, cap);
        std::vector<std::vector<int>> out(d.size(), std::vector<int>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i)
          for (std::size_t j = 0; j < d.size(); ++j) out[i][j] = d.at(i, j);
        return out;
      },
      py::arg("heads"), py::arg("cap") = sf::kDefaultDistanceCap);

  m.def(
      "reconstruct",
      [](std::vector<double> p_start, std::vector<double> p_end, std::vector<double> p_inside,
         const sf::Thresholds& t, const sf::ReconstructionConfig& cfg,
         std::optional<std::vector<std::optional<int>>> heads) {
        sf::TokenProbabilities p{"", std::move(p_start), std::move(p_end), std::move(p_inside)};
        sf::validate(p);
        std::optional<sf::DepDistanceMatrix> d;
        if (heads) d = sf::dep_distances(*heads);
        std::vector<std::pair<std::vector<int>, double>> out;
        for (auto& mwe : sf::reconstruct_sentence(p, t, cfg, d ? &*d : nullptr))
          out.emplace_back(std::move(mwe.token_indices), mwe.score);
        return out;
      },
      py::arg("p_start"), py::arg("p_end"), py::arg("p_inside"), py::arg("thresholds") = sf::Thresholds{},
      py::arg("config") = sf::ReconstructionConfig{}, py::arg("heads") = py::none());

  m.def(
      "micro_prf", [](std::size_t tp, std::size_t fp, std::size_t fn) { return prf_dict(sf::micro_prf({tp, fp, fn})); },
      py::arg("tp"), py::arg("fp"), py::arg("fn"));
  m.def(
      "evaluate",
      [](const std::map<std::string, std::vector<std::vector<int>>>& predictions, const sf::Corpus& gold) {
        auto report = sf::evaluate(to_predictions(predictions), gold);
        return py::module_::import("json").attr("loads")(sf::report_json(report, -1));
      },
      py::arg("predictions"), py::arg("gold"));

  m.def(
      "baseline_score",
      [](const sf::Corpus& train, const sf::Corpus& target) {
        std::map<std::string, std::tuple<std::vector<double>, std::vector<double>, std::vector<double>>> out;
        for (auto& [id, p] : sf::baseline_score(target, sf::build_lexicon(train)))
          out[id] = {p.p_start, p.p_end, p.p_inside};
        return out;
      },
      py::arg("train"), py::arg("target"));

  m.def(
      "augment",
      [](const sf::Corpus& train, const std::string& strategy, double ratio, std::uint64_t seed,
         std::optional<std::filesystem::path> lexicon) {
        sf::AugmentConfig cfg{sf::parse_augment_strategy(strategy), ratio, seed};
        std::optional<sf::SubstitutionLexicon> lex;
        if (lexicon) lex = sf::SubstitutionLexicon::load(*lexicon);
        return sf::augment(train, cfg, lex ? &*lex : nullptr).corpus;
      },
      py::arg("train"), py::arg("strategy"), py::arg("ratio"), py::arg("seed") = 0,
      py::arg("lexicon") = py::none());

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& manifest, unsigned jobs) {
        sf::RunOptions opt;
        opt.jobs = jobs;
        sf::RunSummary summary;
        {
          py::gil_scoped_release release;
          summary = sf::run_pipeline(sf::load_manifest(manifest), opt);
        }
        py::dict d;
        d["thresholds"] = summary.thresholds;
        d["micro"] = prf_dict(summary.report.micro);
        std::vector<std::string> outputs;
        for (const auto& p : summary.outputs) outputs.push_back(p.string());
        d["outputs"] = outputs;
        return d;
      },
      py::arg("manifest"), py::arg("jobs") = 1);
}
