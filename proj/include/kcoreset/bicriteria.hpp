#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/random.hpp"
#include "kcoreset/robust_median.hpp"
#include "kcoreset/sampling.hpp"

namespace kcoreset {

template <class Space>
struct BicriteriaRound {
    std::vector<std::size_t> G;  // indices into the input point set
    CenterSet<Space> Y;
    bool terminal = false;
};

template <class Space>
struct BicriteriaResult {
    std::vector<BicriteriaRound<Space>> rounds;
    CenterSet<Space> B;
    double total_cost = 0.0;
    double alpha = 1.0;       // provider's certificate
    std::size_t beta = 1;     // centers per round, terminal round included
    std::size_t size_bound = 1;
    std::size_t peel_rounds = 0;
    double eps_internal = 0.0;
    double peel_threshold = 0.0;
};

struct BicriteriaConfig {
    double eps = 0.3;
    double eps_rescale = 100.0;
    // Peeling continues while |F_i| >= this. Zero means 10 / eps_internal.
    double min_peel_size = 0.0;
    bool amplify = true;
    Power power{};

    double eps_internal() const { return eps / eps_rescale; }

    double peel_threshold() const { return min_peel_size > 0.0 ? min_peel_size : 10.0 / eps_internal(); }

    void validate() const {
        require(eps > 0.0 && eps <= 1.0, "bicriteria: eps must lie in (0,1]");
        require(eps_rescale >= 1.0, "bicriteria: eps_rescale must be >= 1");
        require(min_peel_size >= 0.0, "bicriteria: min_peel_size must be nonnegative");
        power.validate();
    }
};

inline std::size_t ceil_log2(std::size_t n) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) {
        ++bits;
    }
    return bits;
}

namespace detail {

template <class Fn>
decltype(auto) in_round(std::size_t round, Fn&& fn) {
    const std::string where = "bicriteria round " + std::to_string(round) + ": ";
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError(where + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(where + e.what());
    } catch (const Error& e) {
        throw Error(where + e.what());
    }
}

}  // namespace detail

/// Peeling loop. Each round asks the provider for a robust median of the
/// residue (i tries in round i, best trimmed cost kept), removes the points
/// it serves best, and the residue below the threshold is handed to the
/// provider's terminal step.
///
/// Provider requirements:
///   double alpha; std::size_t beta;
///   std::size_t terminal_beta(std::size_t residue_bound) const;
///   CenterSet median(const PointSet&, Rng&);
///   CenterSet terminal(const PointSet&);
template <class Space, class Provider>
BicriteriaResult<Space> bicriteria(const Space& space, const PointSet<PointOf<Space>>& P, const BicriteriaConfig& config,
                                   Provider& provider, Seed seed) {
    config.validate();
    require(!P.empty(), "bicriteria: empty point set");
    using Point = PointOf<Space>;

    BicriteriaResult<Space> result;
    result.eps_internal = config.eps_internal();
    result.peel_threshold = config.peel_threshold();
    const double keep_fraction = (1.0 - 5.0 * result.eps_internal) * 0.75;

    std::vector<std::size_t> residue(P.size());
    std::iota(residue.begin(), residue.end(), std::size_t{0});

    std::size_t round = 0;
    while (!residue.empty() && static_cast<double>(residue.size()) >= result.peel_threshold) {
        ++round;
        const auto F = P.subset(residue);
        const std::size_t quota = std::max<std::size_t>(1, ceil_count(keep_fraction * static_cast<double>(F.size())));

        CenterSet<Space> best_Y;
        std::vector<std::size_t> best_G;
        double best_cost = std::numeric_limits<double>::infinity();
        const std::size_t tries = config.amplify ? round : 1;
        for (std::size_t attempt = 0; attempt < tries; ++attempt) {
            Rng rng(derive_seed(seed, (static_cast<std::uint64_t>(round) << 20) + attempt));
            auto Y = detail::in_round(round, [&] { return provider.median(F, rng); });
            if (Y.empty()) {
                throw Error("bicriteria round " + std::to_string(round) + ": provider returned no centers");
            }
            const auto d = distances_to(space, F, std::span<const Point>(Y), config.power);
            const auto order = order_by_value(d);
            double trimmed = 0.0;
            for (std::size_t j = 0; j < quota; ++j) {
                trimmed += F.weights[order[j]] * d[order[j]];
            }
            if (trimmed < best_cost) {
                best_cost = trimmed;
                best_Y = std::move(Y);
                best_G.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(quota));
            }
        }

        BicriteriaRound<Space> r;
        r.Y = std::move(best_Y);
        std::vector<char> removed(F.size(), 0);
        for (std::size_t local : best_G) {
            removed[local] = 1;
            r.G.push_back(residue[local]);
        }
        std::sort(r.G.begin(), r.G.end());
        std::vector<std::size_t> next;
        for (std::size_t local = 0; local < F.size(); ++local) {
            if (!removed[local]) {
                next.push_back(residue[local]);
            }
        }
        residue = std::move(next);
        result.rounds.push_back(std::move(r));
    }
    result.peel_rounds = round;

    if (!residue.empty()) {
        BicriteriaRound<Space> r;
        r.terminal = true;
        r.Y = detail::in_round(round + 1, [&] { return provider.terminal(P.subset(residue)); });
        r.G = residue;
        result.rounds.push_back(std::move(r));
    }

    for (const auto& r : result.rounds) {
        result.B.insert(result.B.end(), r.Y.begin(), r.Y.end());
    }
    result.B = unique_points(std::move(result.B));
    result.total_cost = cost_to_set(space, P, std::span<const Point>(result.B), config.power);
    result.alpha = provider.alpha;
    const auto residue_bound = static_cast<std::size_t>(std::ceil(result.peel_threshold)) - 1;
    result.beta = std::max(provider.beta, provider.terminal_beta(std::max<std::size_t>(residue_bound, 1)));
    result.size_bound = result.beta * std::max<std::size_t>(1, ceil_log2(P.size()));
    return result;
}

/// Which constants the metric k-median instantiation uses. `literal` keeps
/// every constant of the analysis (at small n it degenerates to B = P);
/// `desk` keeps the algorithm but uses constants that peel at small n.
struct BicriteriaProfile {
    double eps_rescale = 100.0;
    double min_peel_size = 0.0;
    double c_beta = 1.0;
    bool beta_eps4 = true;

    static BicriteriaProfile literal() { return {100.0, 0.0, 1.0, true}; }
    static BicriteriaProfile desk() { return {100.0, 10.0, 2.0, false}; }
};

inline std::size_t metric_provider_beta(std::size_t k, double eps, double delta, const BicriteriaProfile& profile) {
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    double beta = profile.c_beta * (static_cast<double>(k) + std::log(2.0 / delta));
    if (profile.beta_eps4) {
        beta /= std::pow(eps, 4);
    }
    return std::max<std::size_t>(1, ceil_count(beta));
}

/// Robust-median provider for metric k-median: beta i.i.d. points (or the
/// whole set when it is smaller), returned whole. Terminal step: the residue.
template <class Space>
struct MetricSampleProvider {
    double alpha = 2.0;
    std::size_t beta = 1;

    std::size_t terminal_beta(std::size_t residue_bound) const { return residue_bound; }

    CenterSet<Space> median(const PointSet<PointOf<Space>>& F, Rng& rng) const {
        if (F.size() <= beta) {
            return unique_points(F.points);
        }
        const auto picks = draw_indices(F.weights, beta, rng);
        CenterSet<Space> Y;
        Y.reserve(picks.size());
        for (std::size_t i : picks) {
            Y.push_back(F.points[i]);
        }
        return unique_points(std::move(Y));
    }

    CenterSet<Space> terminal(const PointSet<PointOf<Space>>& residue) const { return unique_points(residue.points); }
};

/// B subset of P with cost(P, B) <= (2 + eps) * min over P^k (z = 1; the
/// certificate for z > 1 is 2^z).
template <class Space>
BicriteriaResult<Space> metric_kmedian_bicriteria(const Space& space, const PointSet<PointOf<Space>>& P, std::size_t k, double eps,
                                                  double delta, Seed seed, const BicriteriaProfile& profile = BicriteriaProfile::desk(),
                                                  Power power = {}) {
    require(k >= 1, "k must be at least 1");
    require(k <= P.size(), "k exceeds the number of points");
    power.validate();
    MetricSampleProvider<Space> provider;
    provider.alpha = std::pow(2.0, power.z);
    provider.beta = metric_provider_beta(k, eps, delta, profile);
    BicriteriaConfig config;
    config.eps = eps;
    config.eps_rescale = profile.eps_rescale;
    config.min_peel_size = profile.min_peel_size;
    config.power = power;
    return bicriteria(space, P, config, provider, seed);
}

}  // namespace kcoreset
