#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/random.hpp"
#include "kcoreset/report.hpp"
#include "kcoreset/sampling.hpp"

namespace kcoreset {

struct RobustParams {
    double gamma = 1.0;
    double eps = 0.0;
    double alpha = 1.0;
    std::size_t beta = 1;

    void validate() const {
        require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0,1]");
        require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
        require(alpha > 0.0, "alpha must be positive");
        require(beta >= 1, "beta must be positive");
    }
};

/// Point indices in increasing order of `value`, ties by index.
inline std::vector<std::size_t> order_by_value(std::span<const double> value) {
    std::vector<std::size_t> order(value.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    return order;
}

/// The cheapest points whose multiplicities reach `quota` (the last one is
/// taken whole). With unit weights this is exactly the `quota` cheapest.
inline std::vector<std::size_t> cheapest_prefix(std::span<const double> value, std::span<const double> weights, double quota) {
    std::vector<std::size_t> chosen;
    double mass = 0.0;
    for (std::size_t i : order_by_value(value)) {
        if (mass >= quota - 1e-9 * std::max(1.0, quota)) {
            break;
        }
        chosen.push_back(i);
        mass += weights[i];
    }
    return chosen;
}

/// Sum of the `quota` smallest values, counting multiplicities; the boundary
/// point contributes only the part of its weight that fits.
inline double trimmed_sum(std::span<const double> value, std::span<const double> weights, double quota) {
    std::vector<std::size_t> order(value.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const bool unit = std::all_of(weights.begin(), weights.end(), [](double w) { return w == 1.0; });
    if (unit) {
        const std::size_t q = std::min(value.size(), static_cast<std::size_t>(std::llround(quota)));
        if (q < order.size()) {
            std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(q), order.end(),
                             [&](std::size_t a, std::size_t b) { return value[a] < value[b] || (value[a] == value[b] && a < b); });
        }
        double total = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            total += value[order[i]];
        }
        return total;
    }
    double mass = 0.0;
    double total = 0.0;
    for (std::size_t i : order_by_value(value)) {
        const double take = std::min(weights[i], quota - mass);
        if (take <= 0.0) {
            break;
        }
        total += take * value[i];
        mass += take;
    }
    return total;
}

template <class Space>
std::vector<double> distances_to(const Space& space, const PointSet<PointOf<Space>>& P, std::span<const PointOf<Space>> Y, Power power) {
    std::vector<double> d(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
        d[i] = dist_pow(space, P.points[i], Y, power);
    }
    return d;
}

/// ceil(fraction * |P|) on multiplicities.
template <class Point>
double quota_of(const PointSet<Point>& P, double fraction) {
    return static_cast<double>(ceil_count(fraction * P.total_weight()));
}

template <class Space>
struct TrimmedOptimum {
    std::size_t candidate = 0;
    double cost = std::numeric_limits<double>::infinity();
};

/// min over candidates c of the cost of the `quota` points nearest to c.
template <class Space>
TrimmedOptimum<Space> best_trimmed_candidate(const Space& space, const PointSet<PointOf<Space>>& P,
                                             std::span<const PointOf<Space>> candidates, double quota, Power power) {
    require(!candidates.empty(), "empty candidate list");
    TrimmedOptimum<Space> best;
    std::vector<double> d(P.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        for (std::size_t i = 0; i < P.size(); ++i) {
            d[i] = powered(space.distance(P.points[i], candidates[c]), power);
        }
        const double value = trimmed_sum(d, P.weights, quota);
        if (value < best.cost) {
            best = {c, value};
        }
    }
    return best;
}

/// Checks Cost(G, Y) <= alpha * min_c cost(P_c, c) where G is the
/// ceil((1-eps) gamma n) points served best by Y and P_c the ceil(gamma n)
/// points nearest to candidate c. Only as strong as the candidate list.
template <class Space>
VerificationReport verify_robust_median(const Space& space, const PointSet<PointOf<Space>>& P, std::span<const PointOf<Space>> Y,
                                        const RobustParams& params, std::span<const PointOf<Space>> candidates, Power power) {
    params.validate();
    require(!P.empty(), "verify_robust_median: empty point set");
    require(!Y.empty(), "verify_robust_median: empty Y");
    require(Y.size() <= params.beta, "verify_robust_median: |Y| exceeds beta");
    const double g_quota = quota_of(P, (1.0 - params.eps) * params.gamma);
    if (g_quota <= 0.0) {
        throw InputError("verify_robust_median: ceil((1-eps) gamma n) is zero");
    }
    const auto d = distances_to(space, P, Y, power);
    const double lhs = trimmed_sum(d, P.weights, g_quota);
    const auto best = best_trimmed_candidate(space, P, candidates, quota_of(P, params.gamma), power);

    VerificationReport report;
    report.check = "robust_median";
    report.bound = params.alpha;
    report.max_discrepancy = lhs == 0.0 ? 0.0 : (best.cost == 0.0 ? std::numeric_limits<double>::infinity() : lhs / best.cost);
    report.argmax_x = best.candidate;
    report.pass = leq_tol(lhs, params.alpha * best.cost);
    report.params = {{"gamma", params.gamma}, {"eps", params.eps},     {"alpha", params.alpha},
                     {"beta", params.beta},   {"cost_G_Y", lhs},        {"trimmed_optimum", best.cost},
                     {"G_size", g_quota},     {"candidates", candidates.size()}};
    return report;
}

template <class Space>
struct MedianChoice {
    PointOf<Space> center;
    std::size_t candidate = 0;
    double trimmed_cost = 0.0;
};

/// The candidate minimizing the cost of its ceil((1-eps) gamma |S|) nearest
/// points. Enumerates centers rather than subsets, which is equivalent for a
/// single center over a finite candidate space.
template <class Space>
MedianChoice<Space> exhaustive_robust_median(const Space& space, const PointSet<PointOf<Space>>& S, double gamma, double eps,
                                             std::span<const PointOf<Space>> candidates, Power power) {
    require(!S.empty(), "exhaustive_robust_median: empty set");
    require(!candidates.empty(), "exhaustive_robust_median: empty candidate list");
    const double quota = quota_of(S, (1.0 - eps) * gamma);
    require(quota > 0.0, "exhaustive_robust_median: trim size is zero");
    const auto best = best_trimmed_candidate(space, S, candidates, quota, power);
    return {candidates[best.candidate], best.candidate, best.cost};
}

struct RobustSampling {
    double gamma = 0.75;
    double eps = 0.1;
    double delta = 0.1;
    std::size_t dim = 1;
    double c = 1.0;
};

/// ceil(c / (eps^4 gamma^2) (dim + ln(1/delta))).
inline std::size_t robust_sample_size(const RobustSampling& p) {
    require(p.eps > 0.0 && p.eps < 1.0 && p.gamma > 0.0 && p.gamma <= 1.0, "robust_sample_size: bad eps or gamma");
    require(p.delta > 0.0 && p.delta < 1.0 && p.c > 0.0 && p.dim >= 1, "robust_sample_size: bad delta, c or dim");
    const double size = p.c / (std::pow(p.eps, 4) * p.gamma * p.gamma) * (static_cast<double>(p.dim) + std::log(1.0 / p.delta));
    return std::max<std::size_t>(1, ceil_count(size));
}

/// Runs `provider` on an i.i.d. sample of F and returns its answer. When the
/// sample would be at least |F|, F itself is handed over; when
/// |F| < 1/(eps gamma) the exhaustive single-center median of F is returned.
template <class Space, class Provider>
CenterSet<Space> sampled_robust_median(const Space& space, const PointSet<PointOf<Space>>& F, const RobustSampling& params, Seed seed,
                                       Provider&& provider, Power power = {}) {
    require(!F.empty(), "sampled_robust_median: empty set");
    if (static_cast<double>(F.size()) < 1.0 / (params.eps * params.gamma)) {
        auto m = exhaustive_robust_median(space, F, params.gamma, params.eps, std::span<const PointOf<Space>>(F.points), power);
        return {m.center};
    }
    const std::size_t size = robust_sample_size(params);
    if (size >= F.size()) {
        return provider(F);
    }
    return provider(iid_sample(F, size, seed));
}

template <class Space>
struct SnapMedian {
    CenterSet<Space> Y;
    double alpha = 2.0;
    std::size_t beta = 0;
};

/// The whole sample as Y. Snapping each optimal center to its nearest
/// sample point at most doubles every served distance, so Y is a
/// ((1-eps) gamma, eps, 2, |S|)-median of S.
template <class Space>
SnapMedian<Space> metric_snap_median(const PointSet<PointOf<Space>>& S, Power power = {}) {
    require(power.z == 1.0, "metric_snap_median: the factor-2 snap needs z = 1; use metric_snap_median_power");
    require(!S.empty(), "metric_snap_median: empty sample");
    SnapMedian<Space> out;
    out.Y = unique_points(S.points);
    out.beta = out.Y.size();
    return out;
}

/// Same construction for dist^z, where the snap costs a factor 2^z.
template <class Space>
SnapMedian<Space> metric_snap_median_power(const PointSet<PointOf<Space>>& S, Power power) {
    power.validate();
    require(!S.empty(), "metric_snap_median_power: empty sample");
    SnapMedian<Space> out;
    out.Y = unique_points(S.points);
    out.alpha = std::pow(2.0, power.z);
    out.beta = out.Y.size();
    return out;
}

}  // namespace kcoreset
