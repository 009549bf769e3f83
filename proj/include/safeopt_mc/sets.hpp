#pragma once

#include <algorithm>
#include <iterator>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "safeopt_mc/confidence.hpp"
#include "safeopt_mc/domain.hpp"
#include "safeopt_mc/errors.hpp"

namespace safeopt_mc {

/// Broadcasts a single Lipschitz constant to every output (index 0 unused).
inline std::vector<double> uniform_lipschitz(double L, int outputs) {
  return std::vector<double>(static_cast<std::size_t>(outputs), L);
}

inline void check_lipschitz(std::span<const double> lipschitz, int outputs) {
  if (static_cast<int>(lipschitz.size()) != outputs) {
    throw ContractViolation("need one Lipschitz constant per output");
  }
  for (int i = 1; i < outputs; ++i) {
    if (!(lipschitz[static_cast<std::size_t>(i)] > 0.0)) {
      throw ContractViolation("Lipschitz constants must be positive");
    }
  }
}

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool is_subset(const IndexSet& inner, const IndexSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

inline IndexSet normalized(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

/// Lipschitz safe set:
///   S_n = ∩_{i>=1} ∪_{a in S_{n-1}} { a' : l_i(a) - L_i ||a - a'|| >= 0 },
/// always including the seed set.
inline IndexSet lipschitz_safe_set(const ConfidenceState& state, const ParameterDomain& domain,
                                   const IndexSet& previous, const IndexSet& seed,
                                   std::span<const double> lipschitz) {
  const int outputs = state.output_count();
  check_lipschitz(lipschitz, outputs);
  const std::size_t n = domain.size();
  if (outputs <= 1) {
    IndexSet all(n);
    for (std::size_t a = 0; a < n; ++a) all[a] = a;
    return all;
  }

  // Only points with a non-negative lower bound can certify anything.
  std::vector<std::vector<std::size_t>> certifiers(static_cast<std::size_t>(outputs));
  for (int i = 1; i < outputs; ++i) {
    for (std::size_t a : previous) {
      if (state.l(a, i) >= 0.0) certifiers[static_cast<std::size_t>(i)].push_back(a);
    }
  }

  std::vector<char> safe(n, 0);
  for (std::size_t cand = 0; cand < n; ++cand) {
    bool all = true;
    for (int i = 1; i < outputs && all; ++i) {
      const double L = lipschitz[static_cast<std::size_t>(i)];
      bool any = false;
      for (std::size_t a : certifiers[static_cast<std::size_t>(i)]) {
        if (state.l(a, i) - L * domain.distance(a, cand) >= 0.0) {
          any = true;
          break;
        }
      }
      all = any;
    }
    safe[cand] = all ? 1 : 0;
  }
  for (std::size_t a : seed) safe[a] = 1;

  IndexSet out;
  for (std::size_t a = 0; a < n; ++a) {
    if (safe[a]) out.push_back(a);
  }
  return out;
}

/// GP-only safe set: S_n = S_0 ∪ { a : l_i(a) >= 0 for all i >= 1 }.
inline IndexSet confidence_safe_set(const ConfidenceState& state, const IndexSet& seed) {
  const int outputs = state.output_count();
  std::vector<char> safe(state.point_count(), 0);
  for (std::size_t a = 0; a < state.point_count(); ++a) {
    bool ok = true;
    for (int i = 1; i < outputs && ok; ++i) ok = state.l(a, i) >= 0.0;
    safe[a] = ok ? 1 : 0;
  }
  for (std::size_t a : seed) safe[a] = 1;
  IndexSet out;
  for (std::size_t a = 0; a < safe.size(); ++a) {
    if (safe[a]) out.push_back(a);
  }
  return out;
}

/// M_n = { a in S_n : u_f(a) >= max_{a' in S_n} l_f(a') }.
inline IndexSet maximizers(const ConfidenceState& state, const IndexSet& safe) {
  if (safe.empty()) throw ContractViolation("maximizers: safe set is empty");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a : safe) best = std::max(best, state.l(a, 0));
  IndexSet out;
  for (std::size_t a : safe) {
    if (state.u(a, 0) >= best) out.push_back(a);
  }
  return out;
}

struct ExpanderResult {
  IndexSet expanders;
  std::vector<std::size_t> scores;  // e_n(a) per domain point, zero outside S_n
};

/// e_n(a) = |{ a' not in S_n : exists i >= 1, u_i(a) - L_i ||a - a'|| >= 0 }|
/// and G_n = { a in S_n : e_n(a) >= 1 }.
inline ExpanderResult expanders(const ConfidenceState& state, const ParameterDomain& domain,
                                const IndexSet& safe, std::span<const double> lipschitz) {
  const int outputs = state.output_count();
  check_lipschitz(lipschitz, outputs);
  if (safe.empty()) throw ContractViolation("expanders: safe set is empty");
  ExpanderResult r;
  r.scores.assign(domain.size(), 0);
  if (outputs <= 1) return r;

  std::vector<char> in_safe(domain.size(), 0);
  for (std::size_t a : safe) in_safe[a] = 1;
  IndexSet outside;
  for (std::size_t a = 0; a < domain.size(); ++a) {
    if (!in_safe[a]) outside.push_back(a);
  }

  for (std::size_t a : safe) {
    std::size_t count = 0;
    for (std::size_t b : outside) {
      for (int i = 1; i < outputs; ++i) {
        if (state.u(a, i) - lipschitz[static_cast<std::size_t>(i)] * domain.distance(a, b) >= 0.0) {
          ++count;
          break;
        }
      }
    }
    r.scores[a] = count;
    if (count >= 1) r.expanders.push_back(a);
  }
  return r;
}

struct Selection {
  std::size_t point = 0;
  int output = 0;
  double width = 0.0;      ///< acquisition value (scaled width when scaling is on)
  double raw_width = 0.0;  ///< u - l
};

/// Most uncertain (a, i) over G_n ∪ M_n. Widths are divided by `output_scale[i]`
/// when given. Ties go to the earlier domain point, then the lower output.
/// Points listed in `excluded` are never returned.
inline Selection select_next(const ConfidenceState& state, const IndexSet& maximizer_set,
                             const IndexSet& expander_set, std::span<const double> output_scale = {},
                             const IndexSet& excluded = {}) {
  const int outputs = state.output_count();
  if (!output_scale.empty() && static_cast<int>(output_scale.size()) != outputs) {
    throw ContractViolation("need one width scale per output");
  }
  const IndexSet candidates = set_union(maximizer_set, expander_set);
  bool found = false;
  Selection best;
  for (std::size_t a : candidates) {
    if (std::binary_search(excluded.begin(), excluded.end(), a)) continue;
    for (int i = 0; i < outputs; ++i) {
      const double raw = state.width(a, i);
      const double w = output_scale.empty() ? raw : raw / output_scale[static_cast<std::size_t>(i)];
      if (!found || w > best.width) {
        best = {a, i, w, raw};
        found = true;
      }
    }
  }
  if (!found) throw NoCandidatesError("no candidates: maximizer and expander sets are empty");
  return best;
}

/// Pessimistic estimate â_n = argmax_{a in S_n} l_f(a), first point on ties.
inline std::size_t best_estimate(const ConfidenceState& state, const IndexSet& safe) {
  if (safe.empty()) throw ContractViolation("best_estimate: safe set is empty");
  std::size_t best = safe.front();
  for (std::size_t a : safe) {
    if (state.l(a, 0) > state.l(best, 0)) best = a;
  }
  return best;
}

}  // namespace safeopt_mc
