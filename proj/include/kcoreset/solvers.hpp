#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kcoreset/bicriteria.hpp"
#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/random.hpp"

namespace kcoreset {

enum class SolveMethod { brute, local_search, bicriteria_project, coreset };

inline const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::brute:
            return "brute";
        case SolveMethod::local_search:
            return "local_search";
        case SolveMethod::bicriteria_project:
            return "bicriteria_project";
        case SolveMethod::coreset:
            return "coreset";
    }
    return "unknown";
}

template <class Space>
struct SolveResult {
    CenterSet<Space> centers;
    std::vector<std::size_t> candidate_index;  // position of each center in the candidate list
    double cost = 0.0;
    SolveMethod method = SolveMethod::brute;
    std::size_t evaluations = 0;
    std::size_t swaps = 0;
};

inline constexpr double kMaxCombinations = 1e6;

/// C(m, k) as a double, saturating far above any guard.
inline double combinations(std::size_t m, std::size_t k) {
    if (k > m) {
        return 0.0;
    }
    k = std::min(k, m - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * static_cast<double>(m - k + i) / static_cast<double>(i);
        if (c > 1e300) {
            return c;
        }
    }
    return std::round(c);
}

namespace detail {

// dist^z(candidate c, point p), cached when the table fits in memory.
template <class Space>
class DistanceTable {
  public:
    static constexpr std::size_t kMaxCells = 20'000'000;

    DistanceTable(const Space& space, const PointSet<PointOf<Space>>& P, std::span<const PointOf<Space>> candidates, Power power)
        : space_(space), P_(P), candidates_(candidates), power_(power), n_(P.size()) {
        if (candidates.size() * n_ <= kMaxCells) {
            table_.resize(candidates.size() * n_);
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                for (std::size_t p = 0; p < n_; ++p) {
                    table_[c * n_ + p] = powered(space.distance(P.points[p], candidates[c]), power);
                }
            }
        }
    }

    double operator()(std::size_t c, std::size_t p) const {
        if (!table_.empty()) {
            return table_[c * n_ + p];
        }
        return powered(space_.distance(P_.points[p], candidates_[c]), power_);
    }

  private:
    const Space& space_;
    const PointSet<PointOf<Space>>& P_;
    std::span<const PointOf<Space>> candidates_;
    Power power_;
    std::size_t n_;
    std::vector<double> table_;
};

template <class Space>
void finish(const Space& space, const PointSet<PointOf<Space>>& P, std::span<const PointOf<Space>> candidates, Power power,
            SolveResult<Space>& result) {
    result.centers.clear();
    for (std::size_t c : result.candidate_index) {
        result.centers.push_back(candidates[c]);
    }
    const double check = cost(space, P, std::span<const PointOf<Space>>(result.centers), power);
    if (std::abs(check - result.cost) > 1e-9 * std::max(1.0, std::abs(check))) {
        throw Error("solver bookkeeping drifted: tracked cost " + std::to_string(result.cost) + ", recomputed " + std::to_string(check));
    }
    result.cost = check;
}

}  // namespace detail

/// Exact optimum over all k-subsets of the candidates (first in
/// lexicographic index order among equals). Refuses above 1e6 subsets.
template <class Space>
SolveResult<Space> brute_force_k_median(const Space& space, const PointSet<PointOf<Space>>& P, std::size_t k,
                                        std::span<const PointOf<Space>> candidates, Power power = {},
                                        double max_combinations = kMaxCombinations) {
    require(!P.empty(), "brute_force_k_median: empty point set");
    require(!candidates.empty(), "brute_force_k_median: no candidates");
    require(k >= 1 && k <= candidates.size(), "brute_force_k_median: need 1 <= k <= |candidates|");
    const double count = combinations(candidates.size(), k);
    if (count > max_combinations) {
        throw ComputationRefused("brute force refused: " + std::to_string(static_cast<long double>(count)) +
                                 " combinations exceed the limit of " + std::to_string(static_cast<long long>(max_combinations)));
    }
    const detail::DistanceTable<Space> table(space, P, candidates, power);
    const std::size_t n = P.size();
    const std::size_t m = candidates.size();

    SolveResult<Space> result;
    result.method = SolveMethod::brute;
    result.cost = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> combo(k);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    std::vector<double> best_d(n);
    for (;;) {
        double total = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            double d = table(combo[0], p);
            for (std::size_t j = 1; j < k; ++j) {
                d = std::min(d, table(combo[j], p));
            }
            total += P.weights[p] * d;
        }
        ++result.evaluations;
        if (total < result.cost) {
            result.cost = total;
            result.candidate_index = combo;
        }
        std::size_t i = k;
        while (i > 0 && combo[i - 1] == m - k + i - 1) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++combo[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            combo[j] = combo[j - 1] + 1;
        }
    }
    detail::finish(space, P, candidates, power, result);
    return result;
}

struct LocalSearchOptions {
    std::size_t max_swaps = 10000;
    std::optional<std::vector<std::size_t>> start;  // candidate indices
};

/// Single-swap local search on the weighted cost with first-improvement
/// acceptance; swap candidates are visited in a seeded random order.
template <class Space>
SolveResult<Space> weighted_local_search(const Space& space, const PointSet<PointOf<Space>>& P, std::size_t k,
                                         std::span<const PointOf<Space>> candidates, Power power, Seed seed,
                                         const LocalSearchOptions& options = {}) {
    require(!P.empty(), "weighted_local_search: empty point set");
    require(!candidates.empty(), "weighted_local_search: no candidates");
    require(k >= 1, "weighted_local_search: k must be >= 1");
    const std::size_t m = candidates.size();
    const std::size_t n = P.size();
    k = std::min(k, m);
    Rng rng(seed);

    std::vector<std::size_t> current;
    if (options.start) {
        current = *options.start;
        require(!current.empty() && current.size() <= k, "weighted_local_search: bad start");
        for (std::size_t c : current) {
            require(c < m, "weighted_local_search: start index out of range");
        }
        k = current.size();
    } else {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = m; i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        current.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    }

    const detail::DistanceTable<Space> table(space, P, candidates, power);
    std::vector<char> in_solution(m, 0);
    std::vector<std::size_t> slot1(n);
    std::vector<double> d1(n);
    std::vector<double> d2(n);
    double current_cost = 0.0;
    auto refresh = [&] {
        std::fill(in_solution.begin(), in_solution.end(), 0);
        for (std::size_t c : current) {
            in_solution[c] = 1;
        }
        current_cost = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            d1[p] = d2[p] = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < current.size(); ++s) {
                const double d = table(current[s], p);
                if (d < d1[p]) {
                    d2[p] = d1[p];
                    d1[p] = d;
                    slot1[p] = s;
                } else if (d < d2[p]) {
                    d2[p] = d;
                }
            }
            current_cost += P.weights[p] * d1[p];
        }
    };
    refresh();

    SolveResult<Space> result;
    result.method = SolveMethod::local_search;
    std::vector<std::pair<std::size_t, std::size_t>> moves;
    moves.reserve(k * m);
    bool improved = true;
    while (improved && result.swaps < options.max_swaps) {
        improved = false;
        moves.clear();
        for (std::size_t s = 0; s < current.size(); ++s) {
            for (std::size_t c = 0; c < m; ++c) {
                moves.emplace_back(s, c);
            }
        }
        for (std::size_t i = moves.size(); i > 1; --i) {
            std::swap(moves[i - 1], moves[rng.below(i)]);
        }
        for (const auto& [slot, c] : moves) {
            if (in_solution[c]) {
                continue;
            }
            double trial = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                const double keep = slot1[p] == slot ? d2[p] : d1[p];
                trial += P.weights[p] * std::min(keep, table(c, p));
            }
            ++result.evaluations;
            if (trial < current_cost - 1e-12 * std::abs(current_cost)) {
                current[slot] = c;
                refresh();
                ++result.swaps;
                improved = true;
                break;
            }
        }
    }
    result.candidate_index = current;
    result.cost = current_cost;
    detail::finish(space, P, candidates, power, result);
    return result;
}

/// Exact when the subset count is within the brute-force guard, otherwise
/// local search.
template <class Space>
SolveResult<Space> solve_weighted(const Space& space, const PointSet<PointOf<Space>>& P, std::size_t k,
                                  std::span<const PointOf<Space>> candidates, Power power, Seed seed) {
    if (combinations(candidates.size(), std::min(k, candidates.size())) <= kMaxCombinations) {
        return brute_force_k_median(space, P, std::min(k, candidates.size()), candidates, power);
    }
    return weighted_local_search(space, P, k, candidates, power, seed);
}

template <class Space>
struct ConstantFactorResult {
    SolveResult<Space> solution;
    BicriteriaResult<Space> bicriteria;
};

/// Bicriteria B, then the best k centers of B for the weighted projection
/// of P onto B (at most |B| distinct points), evaluated on P.
template <class Space>
ConstantFactorResult<Space> constant_factor_metric_kmedian_detail(const Space& space, const PointSet<PointOf<Space>>& P, std::size_t k,
                                                                  double eps, double delta, Seed seed,
                                                                  const BicriteriaProfile& profile = BicriteriaProfile::desk(),
                                                                  Power power = {}) {
    ConstantFactorResult<Space> out;
    out.bicriteria = metric_kmedian_bicriteria(space, P, k, eps, delta, derive_seed(seed, 1), profile, power);
    const auto& B = out.bicriteria.B;
    std::vector<double> mass(B.size(), 0.0);
    const auto owner = assign_nearest(space, P, std::span<const PointOf<Space>>(B));
    for (std::size_t i = 0; i < P.size(); ++i) {
        mass[owner[i]] += P.weights[i];
    }
    const PointSet<PointOf<Space>> projected(B, mass);
    const auto on_projection = solve_weighted(space, projected, k, std::span<const PointOf<Space>>(B), power, derive_seed(seed, 2));
    out.solution = on_projection;
    out.solution.method = SolveMethod::bicriteria_project;
    out.solution.cost = cost(space, P, std::span<const PointOf<Space>>(out.solution.centers), power);
    return out;
}

template <class Space>
SolveResult<Space> constant_factor_metric_kmedian(const Space& space, const PointSet<PointOf<Space>>& P, std::size_t k, double eps,
                                                  double delta, Seed seed, const BicriteriaProfile& profile = BicriteriaProfile::desk(),
                                                  Power power = {}) {
    return constant_factor_metric_kmedian_detail(space, P, k, eps, delta, seed, profile, power).solution;
}

}  // namespace kcoreset
