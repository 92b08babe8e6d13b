#include "spanforge/reconstruct.hpp"

#include <algorithm>
#include <cstdint>

#include "io_util.hpp"
#include "spanforge/error.hpp"

namespace spanforge {

void validate(const Thresholds& t) {
  for (double v : {t.start, t.end, t.inside})
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("thresholds must lie in [0, 1]");
}

std::string_view to_string(OverlapPolicy policy) {
  return policy == OverlapPolicy::AllowAll ? "all" : "greedy";
}

OverlapPolicy parse_overlap_policy(std::string_view name) {
  auto low = detail::to_lower_ascii(name);
  if (low == "greedy" || low == "greedy_nonoverlap") return OverlapPolicy::GreedyNonOverlap;
  if (low == "all" || low == "allow_all") return OverlapPolicy::AllowAll;
  throw ConfigError("unknown overlap policy '" + std::string(name) + "'");
}

void validate(const ReconstructionConfig& cfg) {
  if (cfg.min_members < 2 || cfg.min_members > cfg.max_members || cfg.max_members > cfg.max_width)
    throw ConfigError("reconstruction config requires 2 <= min_members <= max_members <= max_width");
  if (cfg.dep_reject_above < 0) throw ConfigError("dep_reject_above must be non-negative");
}

std::vector<PredictedMwe> enumerate_candidates(const TokenProbabilities& probs, const Thresholds& t,
                                               const ReconstructionConfig& cfg,
                                               EnumerationCounters* counters) {
  validate(probs);
  const auto n = probs.size();
  std::vector<std::size_t> starts, ends;
  for (std::size_t i = 0; i < n; ++i) {
    if (probs.p_start[i] >= t.start) starts.push_back(i);
    if (probs.p_end[i] >= t.end) ends.push_back(i);
  }
  std::vector<PredictedMwe> out;
  const auto max_span = static_cast<std::size_t>(std::max(cfg.max_width, 1) - 1);
  for (auto s : starts) {
    auto e_it = std::upper_bound(ends.begin(), ends.end(), s);
    for (; e_it != ends.end() && *e_it - s <= max_span; ++e_it) {
      const auto e = *e_it;
      if (counters) ++counters->pair_expansions;
      PredictedMwe cand;
      cand.token_indices.push_back(static_cast<int>(s));
      bool too_many = false;
      for (auto k = s + 1; k < e; ++k) {
        if (probs.p_inside[k] < t.inside) continue;
        cand.token_indices.push_back(static_cast<int>(k));
        if (static_cast<int>(cand.token_indices.size()) + 1 > cfg.max_members) {
          too_many = true;
          break;
        }
      }
      if (too_many) continue;
      cand.token_indices.push_back(static_cast<int>(e));
      if (static_cast<int>(cand.token_indices.size()) < cfg.min_members) continue;
      cand.score = probs.p_start[s] * probs.p_end[e];
      out.push_back(std::move(cand));
    }
  }
  return out;
}

std::vector<PredictedMwe> dep_filter(std::vector<PredictedMwe> candidates,
                                     const DepDistanceMatrix* matrix, const ReconstructionConfig& cfg) {
  std::vector<PredictedMwe> out;
  out.reserve(candidates.size());
  for (auto& c : candidates) {
    if (is_contiguous(c.token_indices)) {
      out.push_back(std::move(c));
      continue;
    }
    if (!matrix) throw ConfigError("dependency filter needs a distance matrix for discontinuous candidates");
    if (static_cast<std::size_t>(c.token_indices.back()) >= matrix->size())
      throw ConfigError("distance matrix is smaller than the sentence");
    bool keep = true;
    for (std::size_t k = 1; k < c.token_indices.size() && keep; ++k) {
      auto a = static_cast<std::size_t>(c.token_indices[k - 1]);
      auto b = static_cast<std::size_t>(c.token_indices[k]);
      keep = matrix->at(a, b) <= cfg.dep_reject_above;
    }
    if (keep) out.push_back(std::move(c));
  }
  return out;
}

std::vector<PredictedMwe> resolve_overlaps(std::vector<PredictedMwe> candidates, OverlapPolicy policy) {
  if (policy == OverlapPolicy::AllowAll) return candidates;
  auto by_span = [](const PredictedMwe& a, const PredictedMwe& b) {
    return std::pair(a.token_indices.front(), a.token_indices.back()) <
           std::pair(b.token_indices.front(), b.token_indices.back());
  };
  std::stable_sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return by_span(a, b);
  });
  std::vector<std::uint8_t> used;
  std::vector<PredictedMwe> accepted;
  for (auto& c : candidates) {
    const auto need = static_cast<std::size_t>(c.token_indices.back()) + 1;
    if (used.size() < need) used.resize(need, 0);
    bool clash = std::any_of(c.token_indices.begin(), c.token_indices.end(),
                             [&](int i) { return used[static_cast<std::size_t>(i)] != 0; });
    if (clash) continue;
    for (int i : c.token_indices) used[static_cast<std::size_t>(i)] = 1;
    accepted.push_back(std::move(c));
  }
  std::sort(accepted.begin(), accepted.end(), by_span);
  return accepted;
}

std::vector<PredictedMwe> reconstruct_sentence(const TokenProbabilities& probs, const Thresholds& t,
                                               const ReconstructionConfig& cfg,
                                               const DepDistanceMatrix* matrix) {
  validate(t);
  validate(cfg);
  auto candidates = enumerate_candidates(probs, t, cfg);
  if (cfg.dep_filter) candidates = dep_filter(std::move(candidates), matrix, cfg);
  return resolve_overlaps(std::move(candidates), cfg.overlap);
}

std::vector<PredictedMwe> brute_force_reference(const TokenProbabilities& probs, const Thresholds& t,
                                                const ReconstructionConfig& cfg,
                                                const DepDistanceMatrix* matrix) {
  validate(t);
  validate(cfg);
  validate(probs);
  const auto n = probs.size();
  if (n > kBruteForceMaxTokens)
    throw ConfigError("brute-force reference is limited to " + std::to_string(kBruteForceMaxTokens) + " tokens");

  std::vector<PredictedMwe> found;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int members = __builtin_popcount(mask);
    if (members < cfg.min_members || members > cfg.max_members) continue;
    std::vector<int> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(static_cast<int>(i));
    const auto first = static_cast<std::size_t>(idx.front());
    const auto last = static_cast<std::size_t>(idx.back());
    if (probs.p_start[first] < t.start || probs.p_end[last] < t.end) continue;
    if (static_cast<int>(last - first + 1) > cfg.max_width) continue;
    // Interior tokens are members exactly when they clear the inside gate.
    bool gates = true;
    for (auto k = first + 1; k < last && gates; ++k) {
      const bool member = (mask & (1u << k)) != 0;
      gates = member == (probs.p_inside[k] >= t.inside);
    }
    if (!gates) continue;
    const bool contiguous = static_cast<std::size_t>(members) == last - first + 1;
    if (cfg.dep_filter && !contiguous) {
      if (!matrix) throw ConfigError("dependency filter needs a distance matrix for discontinuous candidates");
      bool near = true;
      for (std::size_t k = 1; k < idx.size(); ++k)
        if (matrix->at(static_cast<std::size_t>(idx[k - 1]), static_cast<std::size_t>(idx[k])) >
            cfg.dep_reject_above)
          near = false;
      if (!near) continue;
    }
    found.push_back({std::move(idx), probs.p_start[first] * probs.p_end[last]});
  }

  auto span_less = [](const PredictedMwe& a, const PredictedMwe& b) {
    if (a.token_indices.front() != b.token_indices.front())
      return a.token_indices.front() < b.token_indices.front();
    return a.token_indices.back() < b.token_indices.back();
  };
  if (cfg.overlap == OverlapPolicy::AllowAll) {
    std::sort(found.begin(), found.end(), span_less);
    return found;
  }
  // Repeatedly take the best remaining candidate that is disjoint from
  // everything taken so far.
  std::vector<PredictedMwe> taken;
  std::vector<bool> done(found.size(), false);
  while (true) {
    std::size_t best = found.size();
    for (std::size_t c = 0; c < found.size(); ++c) {
      if (done[c]) continue;
      bool disjoint = true;
      for (const auto& tk : taken)
        for (int a : tk.token_indices)
          for (int b : found[c].token_indices)
            if (a == b) disjoint = false;
      if (!disjoint) {
        done[c] = true;
        continue;
      }
      if (best == found.size() || found[c].score > found[best].score ||
          (found[c].score == found[best].score && span_less(found[c], found[best])))
        best = c;
    }
    if (best == found.size()) break;
    done[best] = true;
    taken.push_back(found[best]);
  }
  std::sort(taken.begin(), taken.end(), span_less);
  return taken;
}

}  // namespace spanforge
