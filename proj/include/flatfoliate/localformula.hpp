#pragma once

// Local formula for the Euler number of an affinely foliated sphere bundle:
// per-crossing weights from essential tuples, the averaging identities they
// summarize, and the Sullivan-type bound.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "flatfoliate/convention.hpp"
#include "flatfoliate/error.hpp"
#include "flatfoliate/exactgeom.hpp"
#include "flatfoliate/rational.hpp"

namespace flatfoliate {

/// Fiber configuration over a crossing point: bordered rays a_1..a_m in
/// base-orientation order and regular rays r_1..r_k.
///
/// Sheets are addressed by a label: 0..k-1 are the regular rays,
/// k..k+m-1 the bordered ones.
class CrossingConfiguration {
 public:
  CrossingConfiguration(int n, std::vector<RayVector> bordered,
                        std::vector<RayVector> regular)
      : n_(n), bordered_(std::move(bordered)), regular_(std::move(regular)) {
    if (n_ < 2) throw Error(ErrorCode::DimensionMismatch, "n must be >= 2");
    if (regular_.empty())
      throw Error(ErrorCode::InvalidCounts, "a crossing needs k >= 1 regular sheets");
    if (bordered_.size() > static_cast<std::size_t>(n_))
      throw Error(ErrorCode::InvalidCounts, "more than n bordered sheets");
    for (const auto* list : {&bordered_, &regular_})
      for (const auto& r : *list)
        if (r.dim() != static_cast<std::size_t>(n_))
          throw Error(ErrorCode::DimensionMismatch, "ray " + r.str() +
                                                        " is not in R^" +
                                                        std::to_string(n_));
  }

  int n() const noexcept { return n_; }
  std::size_t k() const noexcept { return regular_.size(); }
  std::size_t m() const noexcept { return bordered_.size(); }
  bool is_type_one() const noexcept { return m() == static_cast<std::size_t>(n_); }

  const std::vector<RayVector>& bordered() const noexcept { return bordered_; }
  const std::vector<RayVector>& regular() const noexcept { return regular_; }

  std::size_t bordered_label(std::size_t i) const noexcept { return k() + i; }
  bool is_regular_label(std::size_t label) const noexcept { return label < k(); }

  const RayVector& ray(std::size_t label) const {
    return label < k() ? regular_[label] : bordered_[label - k()];
  }

  std::vector<RayVector> all_rays() const {
    std::vector<RayVector> out = regular_;
    out.insert(out.end(), bordered_.begin(), bordered_.end());
    return out;
  }

  bool is_generic() const { return is_antipodally_generic(all_rays()); }

  CrossingConfiguration with_bordered_swapped(std::size_t i, std::size_t j) const {
    auto b = bordered_;
    std::swap(b.at(i), b.at(j));
    return {n_, std::move(b), regular_};
  }

  friend bool operator==(const CrossingConfiguration&,
                         const CrossingConfiguration&) = default;

 private:
  int n_;
  std::vector<RayVector> bordered_;
  std::vector<RayVector> regular_;
};

inline int permutation_sign(std::span<const int> perm) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return inversions % 2 ? -1 : 1;
}

/// Sheet-availability sets S_0 ⊆ ... ⊆ S_n of the n+1 cells around one
/// vertex, listed in the order the cells are enumerated.
struct ChamberChain {
  int sign = 1;
  std::vector<std::vector<std::size_t>> sheets;

  /// Type-I chain: S_0 = regular sheets, S_i = S_{i-1} ∪ {a_sigma(i)}.
  /// `sigma` is a 0-based permutation of the bordered indices.
  static ChamberChain from_permutation(const CrossingConfiguration& cc,
                                       std::span<const int> sigma) {
    if (!cc.is_type_one())
      throw Error(ErrorCode::TypeMismatch, "permutation chains need m = n");
    if (sigma.size() != static_cast<std::size_t>(cc.n()))
      throw Error(ErrorCode::DimensionMismatch, "sigma must permute n entries");
    std::vector<int> check(sigma.begin(), sigma.end());
    std::sort(check.begin(), check.end());
    for (int i = 0; i < cc.n(); ++i)
      if (check[i] != i)
        throw Error(ErrorCode::InvalidCounts, "sigma is not a permutation");
    std::vector<std::optional<int>> steps(sigma.begin(), sigma.end());
    return from_additions(cc, steps);
  }

  /// General chain: step i adds bordered sheet steps[i] or nothing. Type-II
  /// vertices have fewer than n additions. The sign is that of the order in
  /// which the added bordered sheets appear.
  static ChamberChain from_additions(const CrossingConfiguration& cc,
                                     std::span<const std::optional<int>> steps) {
    if (steps.size() != static_cast<std::size_t>(cc.n()))
      throw Error(ErrorCode::DimensionMismatch, "a chain has n steps");
    ChamberChain chain;
    std::vector<std::size_t> current(cc.k());
    for (std::size_t j = 0; j < cc.k(); ++j) current[j] = j;
    chain.sheets.push_back(current);
    std::vector<int> order;
    for (const auto& s : steps) {
      if (s) {
        if (*s < 0 || static_cast<std::size_t>(*s) >= cc.m() ||
            std::find(order.begin(), order.end(), *s) != order.end())
          throw Error(ErrorCode::InvalidCounts, "bad bordered index in chain");
        order.push_back(*s);
        current.push_back(cc.bordered_label(static_cast<std::size_t>(*s)));
      }
      chain.sheets.push_back(current);
    }
    chain.sign = kApplyOrientationSign ? permutation_sign(order) : 1;
    return chain;
  }

  std::size_t tuple_count() const {
    std::size_t c = 1;
    for (const auto& s : sheets) c *= s.size();
    return c;
  }
};

/// All n! permutations of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

namespace detail {

inline void require_generic(const CrossingConfiguration& cc) {
  if (!cc.is_generic())
    throw Error(ErrorCode::DegenerateConfiguration,
                "configuration is not antipodally generic");
}

inline bool has_repeated_label(std::span<const std::size_t> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j]) return true;
  return false;
}

inline int labeled_index(const CrossingConfiguration& cc,
                         std::span<const std::size_t> labels) {
  if (has_repeated_label(labels)) return 0;
  std::vector<RayVector> rays;
  rays.reserve(labels.size());
  for (auto l : labels) rays.push_back(cc.ray(l));
  return configuration_index(rays);
}

// Odometer over S_0 x ... x S_n; calls f(labels) for each ordered tuple.
template <class F>
void for_each_tuple(const ChamberChain& chain, F&& f) {
  const std::size_t len = chain.sheets.size();
  for (const auto& s : chain.sheets)
    if (s.empty()) return;
  std::vector<std::size_t> pos(len, 0), labels(len);
  while (true) {
    for (std::size_t i = 0; i < len; ++i) labels[i] = chain.sheets[i][pos[i]];
    f(std::span<const std::size_t>(labels));
    std::size_t i = len;
    while (i > 0) {
      --i;
      if (++pos[i] < chain.sheets[i].size()) break;
      pos[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace detail

struct EssentialTuple {
  std::size_t j;  // regular index, 0-based
  int sign;
  friend bool operator==(const EssentialTuple&, const EssentialTuple&) = default;
};

/// One entry per regular sheet r_j for which (r_j, a_1, ..., a_n) spans
/// the origin; the sign is the configuration index in that order.
inline std::vector<EssentialTuple> essential_tuples(const CrossingConfiguration& cc) {
  if (!cc.is_type_one())
    throw Error(ErrorCode::TypeMismatch, "essential tuples need a type-I crossing");
  detail::require_generic(cc);
  std::vector<EssentialTuple> out;
  std::vector<RayVector> tuple;
  tuple.reserve(cc.bordered().size() + 1);
  for (std::size_t j = 0; j < cc.k(); ++j) {
    tuple.clear();
    tuple.push_back(cc.regular()[j]);
    tuple.insert(tuple.end(), cc.bordered().begin(), cc.bordered().end());
    const auto lambda = signed_cofactors(tuple);
    if (verdict_from_cofactors(lambda) == SpanVerdict::Interior)
      out.push_back({j, sign(lambda[0])});
  }
  return out;
}

/// (NC+ - NC-) / (k (k+1) ... (k+n)).
inline Rational vertex_weight(const CrossingConfiguration& cc) {
  Integer net = 0;
  for (const auto& e : essential_tuples(cc)) net += e.sign;
  Rational w(net, rising_product(static_cast<std::int64_t>(cc.k()), cc.n()));
  w.canonicalize();
  return w;
}

/// sign(chain) times the average configuration index over every ordered
/// tuple (s_0 ∈ S_0, ..., s_n ∈ S_n).
inline Rational direct_vertex_expectation(const ChamberChain& chain,
                                          const CrossingConfiguration& cc) {
  if (chain.sheets.size() != static_cast<std::size_t>(cc.n()) + 1)
    throw Error(ErrorCode::DimensionMismatch, "chain must have n+1 cells");
  detail::require_generic(cc);
  Integer total = 0;
  detail::for_each_tuple(chain, [&](std::span<const std::size_t> labels) {
    total += detail::labeled_index(cc, labels);
  });
  Rational e(Integer(total * chain.sign),
             Integer(static_cast<unsigned long>(chain.tuple_count())));
  e.canonicalize();
  return e;
}

/// Sorting of all ordered tuples of a chain into the three classes of the
/// cancellation argument.
struct CancellationAudit {
  std::size_t repetition = 0;       // a sheet appears twice
  std::size_t matched_pairs = 0;    // >= 2 regular entries, paired by a swap
  std::size_t single_regular = 0;   // exactly one regular entry, no repeats
  std::size_t essential = 0;        // single-regular tuples with index != 0
  Integer repetition_index_sum = 0;
  Integer matched_index_sum = 0;
  Integer single_regular_index_sum = 0;
  bool matching_is_involution = true;
  bool matching_negates_index = true;

  bool verified() const {
    return repetition_index_sum == 0 && matched_index_sum == 0 &&
           matching_is_involution && matching_negates_index;
  }
};

namespace detail {

// Swap the first two regular entries. Returns false if there are fewer than two.
template <class IsRegular>
bool swap_first_two_regular(std::vector<std::size_t>& positions_out,
                            std::size_t len, IsRegular&& is_regular) {
  positions_out.clear();
  for (std::size_t i = 0; i < len && positions_out.size() < 2; ++i)
    if (is_regular(i)) positions_out.push_back(i);
  return positions_out.size() == 2;
}

}  // namespace detail

inline CancellationAudit cancellation_audit(const ChamberChain& chain,
                                            const CrossingConfiguration& cc) {
  if (chain.sheets.size() != static_cast<std::size_t>(cc.n()) + 1)
    throw Error(ErrorCode::DimensionMismatch, "chain must have n+1 cells");
  detail::require_generic(cc);
  CancellationAudit audit;
  std::size_t class_two = 0;
  std::vector<std::size_t> swap_pos;
  detail::for_each_tuple(chain, [&](std::span<const std::size_t> labels) {
    const int index = detail::labeled_index(cc, labels);
    if (detail::has_repeated_label(labels)) {
      ++audit.repetition;
      audit.repetition_index_sum += index;
      return;
    }
    std::size_t regular_entries = 0;
    for (auto l : labels) regular_entries += cc.is_regular_label(l);
    if (regular_entries == 1) {
      ++audit.single_regular;
      audit.single_regular_index_sum += index;
      if (index != 0) ++audit.essential;
      return;
    }
    ++class_two;
    audit.matched_index_sum += index;
    std::vector<std::size_t> partner(labels.begin(), labels.end());
    auto is_reg = [&](std::size_t i) { return cc.is_regular_label(partner[i]); };
    detail::swap_first_two_regular(swap_pos, partner.size(), is_reg);
    std::swap(partner[swap_pos[0]], partner[swap_pos[1]]);
    std::vector<std::size_t> back = partner;
    auto is_reg_back = [&](std::size_t i) { return cc.is_regular_label(back[i]); };
    detail::swap_first_two_regular(swap_pos, back.size(), is_reg_back);
    std::swap(back[swap_pos[0]], back[swap_pos[1]]);
    if (!std::equal(back.begin(), back.end(), labels.begin()) ||
        std::equal(partner.begin(), partner.end(), labels.begin()))
      audit.matching_is_involution = false;
    if (detail::labeled_index(cc, partner) != -index)
      audit.matching_negates_index = false;
  });
  if (class_two % 2) audit.matching_is_involution = false;
  audit.matched_pairs = class_two / 2;
  return audit;
}

/// n! * sum over crossings of vertex_weight.
inline Rational euler_number(std::span<const CrossingConfiguration> crossings, int n) {
  Rational sum = 0;
  for (std::size_t i = 0; i < crossings.size(); ++i) {
    if (crossings[i].n() != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "crossing " + std::to_string(i) + " has the wrong dimension");
    try {
      sum += vertex_weight(crossings[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "crossing " + std::to_string(i) + ": " + e.what());
    }
  }
  return sum * Rational(factorial(n));
}

/// n! X K / (k (k+1) ... (k+n)).
inline Rational sullivan_bound(std::int64_t crossings, std::int64_t k_min,
                               std::int64_t k_max, int n) {
  if (crossings < 0 || k_min < 1 || k_max < k_min)
    throw Error(ErrorCode::InvalidCounts,
                "need X >= 0 and 1 <= k_min <= k_max");
  Rational b(factorial(n) * Integer(static_cast<long>(crossings)) *
                 Integer(static_cast<long>(k_max)),
             rising_product(k_min, n));
  b.canonicalize();
  return b;
}

// ---------------------------------------------------------------------------
// N parallel quasisections

namespace detail {

inline void check_parallel(std::span<const CrossingConfiguration> configs,
                           const ChamberChain& chain) {
  const auto& first = configs.front();
  const int n = first.n();
  if (configs.size() < static_cast<std::size_t>(n) + 1)
    throw Error(ErrorCode::TooFewQuasisections,
                "N = " + std::to_string(configs.size()) + " < n + 1");
  for (const auto& c : configs)
    if (c.n() != n || c.k() != first.k() || c.m() != first.m())
      throw Error(ErrorCode::TypeMismatch,
                  "parallel configurations must share the branch structure");
  if (chain.sheets.size() != static_cast<std::size_t>(n) + 1)
    throw Error(ErrorCode::DimensionMismatch, "chain must have n+1 cells");
  std::vector<RayVector> all;
  for (const auto& c : configs) {
    auto r = c.all_rays();
    all.insert(all.end(), r.begin(), r.end());
  }
  if (!is_antipodally_generic(all))
    throw Error(ErrorCode::DegenerateConfiguration,
                "union of the parallel configurations is not generic");
}

struct ColoredSheet {
  std::size_t quasisection;
  std::size_t label;
  friend bool operator==(const ColoredSheet&, const ColoredSheet&) = default;
};

// Calls f(colors, tuple) for every injective coloring of the n+1 cells and
// every choice of one sheet per cell from its quasisection.
template <class F>
void for_each_colored_tuple(std::span<const CrossingConfiguration> configs,
                            const ChamberChain& chain, F&& f) {
  const std::size_t cells = chain.sheets.size();
  const std::size_t big_n = configs.size();
  std::vector<std::size_t> colors(cells);
  std::vector<bool> used(big_n, false);
  std::vector<ColoredSheet> tuple(cells);
  auto recurse = [&](auto&& self, std::size_t cell) -> void {
    if (cell == cells) {
      for_each_tuple(chain, [&](std::span<const std::size_t> labels) {
        for (std::size_t i = 0; i < cells; ++i) tuple[i] = {colors[i], labels[i]};
        f(std::span<const std::size_t>(colors), std::span<const ColoredSheet>(tuple));
      });
      return;
    }
    for (std::size_t j = 0; j < big_n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      colors[cell] = j;
      self(self, cell + 1);
      used[j] = false;
    }
  };
  recurse(recurse, 0);
}

inline int colored_index(std::span<const CrossingConfiguration> configs,
                         std::span<const ColoredSheet> tuple) {
  std::vector<RayVector> rays;
  rays.reserve(tuple.size());
  for (const auto& s : tuple) rays.push_back(configs[s.quasisection].ray(s.label));
  return configuration_index(rays);
}

}  // namespace detail

/// Exact expectation of sign(chain) * index for N parallel quasisections:
/// a uniformly random injective coloring of the n+1 cells by quasisections,
/// then a uniform sheet per cell from the quasisection of its color. The
/// chain's labels are read in every configuration.
inline Rational parallel_vertex_expectation(
    std::span<const CrossingConfiguration> configs, const ChamberChain& chain) {
  if (configs.empty())
    throw Error(ErrorCode::TooFewQuasisections, "no quasisections");
  detail::check_parallel(configs, chain);
  Integer total = 0, outcomes = 0;
  detail::for_each_colored_tuple(
      configs, chain,
      [&](std::span<const std::size_t>, std::span<const detail::ColoredSheet> t) {
        total += detail::colored_index(configs, t);
        ++outcomes;
      });
  Rational e(Integer(total * chain.sign), outcomes);
  e.canonicalize();
  return e;
}

/// The per-vertex bound k / (k (k+1) ... (k+n)) for parallel averaging.
inline Rational parallel_bound(std::size_t k, int n) {
  Rational b(Integer(static_cast<unsigned long>(k)),
             rising_product(static_cast<std::int64_t>(k), n));
  b.canonicalize();
  return b;
}

struct ParallelAudit {
  std::size_t outcomes = 0;
  std::size_t matched = 0;            // >= 2 regular entries
  std::size_t single_regular = 0;     // s_0 regular, every other entry bordered
  std::size_t diagonal = 0;           // single-regular with s_i = a_sigma(i) in cell i
  std::size_t cross_branch_nonzero = 0;  // single-regular, non-diagonal, index != 0
  Integer matched_index_sum = 0;
  Integer single_regular_index_sum = 0;
  bool matching_negates_index = true;
};

/// Classifies every outcome of the parallel averaging. Matched tuples are
/// paired by swapping their first two regular entries together with their
/// colors.
inline ParallelAudit parallel_cancellation_audit(
    std::span<const CrossingConfiguration> configs, const ChamberChain& chain) {
  if (configs.empty())
    throw Error(ErrorCode::TooFewQuasisections, "no quasisections");
  detail::check_parallel(configs, chain);
  const auto& first = configs.front();
  ParallelAudit audit;
  std::vector<detail::ColoredSheet> partner;
  detail::for_each_colored_tuple(
      configs, chain,
      [&](std::span<const std::size_t>, std::span<const detail::ColoredSheet> t) {
        ++audit.outcomes;
        const int index = detail::colored_index(configs, t);
        std::vector<std::size_t> reg_pos;
        for (std::size_t i = 0; i < t.size(); ++i)
          if (first.is_regular_label(t[i].label)) reg_pos.push_back(i);
        if (reg_pos.size() >= 2) {
          ++audit.matched;
          audit.matched_index_sum += index;
          partner.assign(t.begin(), t.end());
          std::swap(partner[reg_pos[0]], partner[reg_pos[1]]);
          if (detail::colored_index(configs, partner) != -index)
            audit.matching_negates_index = false;
          return;
        }
        ++audit.single_regular;
        audit.single_regular_index_sum += index;
        bool diagonal = true;
        for (std::size_t i = 1; i < t.size(); ++i)
          if (t[i].label != chain.sheets[i].back()) diagonal = false;
        if (diagonal)
          ++audit.diagonal;
        else if (index != 0)
          ++audit.cross_branch_nonzero;
      });
  return audit;
}

}  // namespace flatfoliate
