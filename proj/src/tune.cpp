#include "spanforge/tune.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <set>
#include <thread>

#include "io_util.hpp"
#include "spanforge/error.hpp"
#include "spanforge/random.hpp"

namespace spanforge {

namespace {

double round6(double v) { return std::round(v * 1e6) / 1e6; }

}  // namespace

ThresholdGrid ThresholdGrid::defaults() { return parse("0.2:0.6:0.05"); }

ThresholdGrid ThresholdGrid::parse(std::string_view text) {
  auto bad = [&] { return ConfigError("grid must look like lo:hi:step, got '" + std::string(text) + "'"); };
  auto c1 = text.find(':');
  if (c1 == std::string_view::npos) throw bad();
  auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw bad();
  auto number = [&](std::string_view text) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw bad();
    return v;
  };
  const double lo = number(text.substr(0, c1));
  const double hi = number(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = number(text.substr(c2 + 1));
  if (!(step > 0) || hi < lo) throw bad();
  ThresholdGrid g;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long k = 0; k < count; ++k) g.values.push_back(round6(lo + static_cast<double>(k) * step));
  validate(g);
  return g;
}

void validate(const ThresholdGrid& grid) {
  if (grid.values.empty()) throw ConfigError("threshold grid is empty");
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (!(grid.values[i] >= 0.0 && grid.values[i] <= 1.0)) throw ConfigError("grid values must lie in [0, 1]");
    if (i && grid.values[i] <= grid.values[i - 1]) throw ConfigError("grid values must be strictly ascending");
  }
}

Predictions reconstruct_corpus(const Corpus& corpus, const ProbabilityMap& probs, const Thresholds& t,
                               const ReconstructionConfig& cfg,
                               const std::map<std::string, DepDistanceMatrix>* matrices) {
  Predictions out;
  out.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) {
    auto p = probs.find(s.id);
    if (p == probs.end()) throw ValidationError("no probabilities for sentence '" + s.id + "'");
    if (p->second.size() != s.size())
      throw ValidationError("sentence '" + s.id + "': probabilities have length " +
                            std::to_string(p->second.size()) + ", expected " + std::to_string(s.size()));
    const DepDistanceMatrix* m = nullptr;
    if (matrices)
      if (auto it = matrices->find(s.id); it != matrices->end()) m = &it->second;
    out.push_back({s.id, reconstruct_sentence(p->second, t, cfg, m)});
  }
  return out;
}

TuneResult grid_search(const Corpus& dev, const ProbabilityMap& probs, const ThresholdGrid& grid,
                       const ReconstructionConfig& cfg,
                       const std::map<std::string, DepDistanceMatrix>* matrices, unsigned jobs) {
  validate(grid);
  validate(cfg);
  for (const auto& s : dev.sentences)
    if (!probs.count(s.id)) throw ValidationError("no probabilities for dev sentence '" + s.id + "'");

  const auto& v = grid.values;
  const std::size_t g = v.size();
  TuneResult result;
  result.trace.resize(g * g * g);
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b)
      for (std::size_t c = 0; c < g; ++c) result.trace[(a * g + b) * g + c].thresholds = {v[a], v[b], v[c]};

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, result.trace.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < result.trace.size() && !failed; i = next++) {
        auto& point = result.trace[i];
        auto preds = reconstruct_corpus(dev, probs, point.thresholds, cfg, matrices);
        point.prf = micro_prf(exact_match_counts(preds, dev));
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // F1 is compared as an exact fraction; the first (lexicographically
  // smallest) maximiser wins.
  std::size_t best = 0;
  auto better = [](const Ratio& x, const Ratio& y) {
    // x > y  <=>  x.num * y.den > y.num * x.den, with 0/0 treated as 0.
    const unsigned __int128 lhs = static_cast<unsigned __int128>(x.num) * (y.den ? y.den : 1);
    const unsigned __int128 rhs = static_cast<unsigned __int128>(y.num) * (x.den ? x.den : 1);
    return lhs > rhs;
  };
  for (std::size_t i = 1; i < result.trace.size(); ++i)
    if (better(result.trace[i].prf.f1, result.trace[best].prf.f1)) best = i;
  result.best = result.trace[best].thresholds;
  result.best_f1 = result.trace[best].prf.f1;
  return result;
}

std::string trace_tsv(const TuneResult& result) {
  std::string out = "tau_start\ttau_end\ttau_inside\tprecision\trecall\tf1\n";
  for (const auto& p : result.trace) {
    for (double t : {p.thresholds.start, p.thresholds.end, p.thresholds.inside}) {
      out += detail::format_shortest(t);
      out += '\t';
    }
    out += detail::format_fixed(p.prf.precision.value(), 6) + '\t';
    out += detail::format_fixed(p.prf.recall.value(), 6) + '\t';
    out += detail::format_fixed(p.prf.f1.value(), 6) + '\n';
  }
  return out;
}

std::pair<Corpus, Corpus> carve_dev(const Corpus& train, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("dev fraction must lie in (0, 1)");
  const auto n = train.sentences.size();
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  if (k == 0) throw ConfigError("dev fraction selects no sentences");
  Engine rng(seed);
  auto picked = sample_without_replacement(rng, n, k);
  std::set<std::size_t> chosen(picked.begin(), picked.end());
  Corpus rest{train.name, {}}, dev{train.name + "-dev", {}};
  for (std::size_t i = 0; i < n; ++i) {
    if (chosen.count(i)) {
      auto s = train.sentences[i];
      s.split = Split::Dev;
      dev.sentences.push_back(std::move(s));
    } else {
      rest.sentences.push_back(train.sentences[i]);
    }
  }
  return {std::move(rest), std::move(dev)};
}

}  // namespace spanforge
