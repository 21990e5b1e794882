#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "kcoreset/bicriteria.hpp"
#include "kcoreset/coreset.hpp"
#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/random.hpp"
#include "kcoreset/report.hpp"
#include "kcoreset/solvers.hpp"

namespace kcoreset {

struct CoresetConfig {
    std::size_t k = 3;
    double eps = 0.2;
    double delta = 0.1;
    Power power{};
    double c = 1.0;
    std::optional<std::size_t> t;  // overrides the size formula
    BicriteriaProfile profile = BicriteriaProfile::desk();

    void validate() const {
        require(k >= 1, "k must be at least 1");
        require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
        require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
        require(c > 0.0 && std::isfinite(c), "c must be positive");
        require(!t || *t >= 1, "t must be at least 1");
        power.validate();
    }

    /// The (1 + 10 eps) inflation is run at eps / (40 * 2^(z-1)), which
    /// keeps the bias it adds to a quarter of the target error or less.
    double inflation_eps() const { return eps / (40.0 * std::pow(2.0, power.z - 1.0)); }
};

/// Range-space dimension used in the sample size: k ln n for a finite
/// metric, k d in R^d.
template <class Space>
double coreset_dimension(const Space& space, std::size_t n, std::size_t k) {
    if constexpr (std::is_same_v<Space, EuclideanSpace>) {
        return static_cast<double>(k * space.dim());
    } else {
        return static_cast<double>(k) * std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
    }
}

template <class Space>
std::size_t coreset_sample_size(const Space& space, std::size_t n, const CoresetConfig& config) {
    if (config.t) {
        return *config.t;
    }
    const double dim = coreset_dimension(space, n, config.k);
    if (config.power.z == 1.0) {
        return std::max<std::size_t>(1, ceil_count(config.c / (config.eps * config.eps) * (dim + std::log(1.0 / config.delta))));
    }
    return power_z_sample_size(dim, config.k, config.eps, config.delta, config.power, config.c);
}

template <class Space>
struct StrongCoreset {
    StaticCoreset<PointOf<Space>> coreset;
    CenterSet<Space> B;
    double bicriteria_cost = 0.0;
    std::size_t t = 0;
    double inflation_eps = 0.0;
};

/// k centers from the constant-factor solver, then the k-median coreset
/// (its z > 1 variant when z > 1) around them.
template <class Space>
StrongCoreset<Space> build_strong_coreset(const Space& space, const PointSet<PointOf<Space>>& P, const CoresetConfig& config, Seed seed) {
    config.validate();
    require(!P.empty(), "build_strong_coreset: empty point set");
    require(config.k <= P.size(), "k exceeds the number of points");
    StrongCoreset<Space> out;
    out.B = constant_factor_metric_kmedian(space, P, config.k, config.eps, config.delta, derive_seed(seed, 11), config.profile,
                                           config.power)
                .centers;
    const std::span<const PointOf<Space>> B(out.B);
    out.bicriteria_cost = cost(space, P, B, config.power);
    out.t = coreset_sample_size(space, P.size(), config);
    out.inflation_eps = config.inflation_eps();
    out.coreset = config.power.z == 1.0 ? k_median_coreset(space, P, B, out.t, out.inflation_eps, config.power, derive_seed(seed, 12))
                                        : power_z_coreset(space, P, B, out.t, out.inflation_eps, config.power, derive_seed(seed, 12));
    return out;
}

/// `count` tuples of k centers drawn uniformly from P^k.
template <class Point>
std::vector<std::vector<Point>> random_queries(const PointSet<Point>& P, std::size_t k, std::size_t count, Seed seed) {
    require(!P.empty() && k >= 1, "random_queries: empty point set or k = 0");
    Rng rng(seed);
    std::vector<std::vector<Point>> queries;
    queries.reserve(count);
    for (std::size_t q = 0; q < count; ++q) {
        std::vector<Point> x;
        for (std::size_t j = 0; j < k; ++j) {
            x.push_back(P.points[rng.below(P.size())]);
        }
        queries.push_back(std::move(x));
    }
    return queries;
}

template <class Space>
struct HardQueries {
    std::vector<CenterSet<Space>> queries;
    bool exact_optimum = false;
    double optimum_cost = 0.0;
};

/// The optimum over P^k when brute force is allowed; otherwise a local
/// optimum started from the constant-factor solution plus, for each of its
/// centers, the solution with that center moved to its nearest other point.
template <class Space>
HardQueries<Space> optimum_queries(const Space& space, const PointSet<PointOf<Space>>& P, std::size_t k, Power power, Seed seed) {
    using Point = PointOf<Space>;
    const std::span<const Point> candidates(P.points);
    HardQueries<Space> out;
    if (combinations(P.size(), k) <= kMaxCombinations) {
        const auto best = brute_force_k_median(space, P, k, candidates, power);
        out.queries.push_back(best.centers);
        out.exact_optimum = true;
        out.optimum_cost = best.cost;
        return out;
    }
    const auto start = constant_factor_metric_kmedian(space, P, k, 0.3, 0.1, derive_seed(seed, 1), BicriteriaProfile::desk(), power);
    std::vector<std::size_t> start_idx;
    for (const auto& c : start.centers) {
        for (std::size_t i = 0; i < P.size(); ++i) {
            if (P.points[i] == c) {
                start_idx.push_back(i);
                break;
            }
        }
    }
    LocalSearchOptions options;
    options.start = start_idx;
    const auto local = weighted_local_search(space, P, k, candidates, power, derive_seed(seed, 2), options);
    out.queries.push_back(local.centers);
    out.optimum_cost = local.cost;
    for (std::size_t s = 0; s < local.centers.size(); ++s) {
        std::size_t nearest = P.size();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < P.size(); ++i) {
            if (std::find(local.candidate_index.begin(), local.candidate_index.end(), i) != local.candidate_index.end()) {
                continue;
            }
            const double d = space.distance(P.points[i], local.centers[s]);
            if (d > 0.0 && d < best) {
                best = d;
                nearest = i;
            }
        }
        if (nearest < P.size()) {
            auto x = local.centers;
            x[s] = P.points[nearest];
            out.queries.push_back(std::move(x));
        }
    }
    return out;
}

/// Default verification queries: `random` uniform tuples plus the hard ones.
template <class Space>
std::vector<CenterSet<Space>> verification_queries(const Space& space, const PointSet<PointOf<Space>>& P, std::size_t k,
                                                   std::size_t random, Power power, Seed seed) {
    auto queries = random_queries(P, k, random, derive_seed(seed, 21));
    auto hard = optimum_queries(space, P, k, power, derive_seed(seed, 22));
    queries.insert(queries.end(), hard.queries.begin(), hard.queries.end());
    return queries;
}

template <class Space>
struct CoresetSolveAudit {
    SolveResult<Space> solution;  // cost field holds the true cost on P
    double coreset_cost = 0.0;
    double true_cost = 0.0;
    StrongCoreset<Space> coreset;
};

/// Builds the strong coreset, solves k-median on it with centers from P,
/// and evaluates the answer on P.
template <class Space>
CoresetSolveAudit<Space> solve_on_coreset(const Space& space, const PointSet<PointOf<Space>>& P, const CoresetConfig& config, Seed seed) {
    CoresetSolveAudit<Space> audit;
    audit.coreset = build_strong_coreset(space, P, config, derive_seed(seed, 31));
    const std::span<const PointOf<Space>> candidates(P.points);
    audit.solution = solve_weighted(space, audit.coreset.coreset.points, config.k, candidates, config.power, derive_seed(seed, 32));
    audit.coreset_cost = audit.solution.cost;
    audit.true_cost = cost(space, P, std::span<const PointOf<Space>>(audit.solution.centers), config.power);
    audit.solution.cost = audit.true_cost;
    audit.solution.method = SolveMethod::coreset;
    return audit;
}

}  // namespace kcoreset
