#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/random.hpp"
#include "kcoreset/report.hpp"
#include "kcoreset/sampling.hpp"

namespace kcoreset {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Weighted points evaluated as sum w(p) dist^z(p, x).
template <class Point>
struct StaticCoreset {
    PointSet<Point> points;
    std::vector<double> thresholds;  // per point, informational; +inf on centers
    Power power{};
    double eps = 0.0;                // the eps of the (1 + 10 eps) inflation
    std::size_t draws = 0;           // t, before merging repeated draws
    std::size_t centers = 0;         // |B|
    double input_mass = 0.0;         // sum of input multiplicities
    double expected_weight_sum = 0.0;  // exact for k_median_coreset, the mean for sensitivity_coreset
    bool degenerate = false;
};

/// Threshold coreset: a sampled part whose weights switch off near the query and
/// the projections of all points, which switch on far from it.
template <class Point>
struct ThresholdCoreset {
    struct Sampled {
        Point point;
        std::size_t center = 0;  // index in B of proj(p, B)
        double base_weight = 0.0;
        double threshold = 0.0;
    };
    // Projections onto one center, as sorted thresholds with prefix sums of
    // multiplicities.
    struct Projected {
        std::vector<double> thresholds;
        std::vector<double> prefix;  // prefix[i] = multiplicity of thresholds[0..i)
    };

    std::vector<Sampled> sampled;
    std::vector<Point> B;
    std::vector<Projected> projected;
    Power power{};
    double eps = 0.0;
    std::size_t n = 0;
    bool degenerate = false;
};

/// m_p = ceil(scale * d_p / sum d) + extra for each point.
inline std::vector<std::uint64_t> sensitivity_multipliers(std::span<const double> d, std::span<const double> mass, double scale,
                                                          std::uint64_t extra) {
    double weighted = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        weighted += mass[i] * d[i];
    }
    std::vector<std::uint64_t> m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m[i] = static_cast<std::uint64_t>(ceil_count(scale * d[i] / weighted)) + extra;
    }
    return m;
}

/// w(b) = (1 + 10 eps) * mass of P_b - sampled weight landing in P_b.
inline double center_weight(double eps, double cluster_mass, double sampled_in_cluster) {
    return (1.0 + 10.0 * eps) * cluster_mass - sampled_in_cluster;
}

namespace detail {

template <class Space>
struct Assignment {
    std::vector<std::size_t> owner;
    std::vector<double> d;  // dist^z to the owner
    double total = 0.0;     // sum |w| d
};

template <class Space>
Assignment<Space> assign(const Space& space, const PointSet<PointOf<Space>>& P, std::span<const PointOf<Space>> B, Power power) {
    Assignment<Space> a;
    a.owner.resize(P.size());
    a.d.resize(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
        const auto nearest = nearest_center(space, P.points[i], B);
        a.owner[i] = nearest.index;
        a.d[i] = powered(nearest.distance, power);
        a.total += std::abs(P.weights[i]) * a.d[i];
    }
    return a;
}

// Merges repeated draws of one source point into a single weighted entry,
// keeping first-draw order.
template <class Point>
void merge_draws(const PointSet<Point>& P, std::span<const std::size_t> draws, std::span<const double> draw_weight,
                 std::span<const double> tau, StaticCoreset<Point>& out) {
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t j = 0; j < draws.size(); ++j) {
        const std::size_t src = draws[j];
        auto [it, fresh] = slot.try_emplace(src, out.points.size());
        if (fresh) {
            out.points.push_back(P.points[src], 0.0);
            out.thresholds.push_back(tau[src]);
        }
        out.points.weights[it->second] += draw_weight[j];
    }
}

}  // namespace detail

/// Sensitivity sampling against a bicriteria solution B:
/// m_p = ceil(n dist^z(p,B) / cost(P,B)) + 2, a sample of
/// eps_approx_sample_size at eps' = eps n / sum m, weights sum m / (m_p |S|).
template <class Space>
StaticCoreset<PointOf<Space>> sensitivity_coreset(const Space& space, const PointSet<PointOf<Space>>& P,
                                                  std::span<const PointOf<Space>> B, const SampleParams& params, Power power, Seed seed) {
    params.validate();
    require(!P.empty() && !B.empty(), "sensitivity_coreset: empty input");
    require(P.unit_weights(), "sensitivity_coreset: expects unit multiplicities");
    const auto a = detail::assign(space, P, B, power);
    StaticCoreset<PointOf<Space>> out;
    out.power = power;
    out.eps = params.eps;
    out.centers = B.size();
    out.input_mass = static_cast<double>(P.size());
    out.expected_weight_sum = out.input_mass;
    if (P.size() == 1) {
        out.points = P;
        out.thresholds = {kInf};
        out.draws = 1;
        return out;
    }
    if (a.total == 0.0) {
        out.degenerate = true;
        std::vector<double> count(B.size(), 0.0);
        for (std::size_t owner : a.owner) {
            count[owner] += 1.0;
        }
        for (std::size_t b = 0; b < B.size(); ++b) {
            if (count[b] > 0.0) {
                out.points.push_back(B[b], count[b]);
                out.thresholds.push_back(kInf);
            }
        }
        return out;
    }
    const std::vector<double> unit(P.size(), 1.0);
    const auto m = sensitivity_multipliers(a.d, unit, static_cast<double>(P.size()), 2);
    const double total_m = std::accumulate(m.begin(), m.end(), 0.0, [](double s, std::uint64_t v) { return s + static_cast<double>(v); });
    SampleParams effective = params;
    effective.eps = params.eps * static_cast<double>(P.size()) / total_m;
    const std::size_t t = eps_approx_sample_size(effective);

    std::vector<double> w(m.begin(), m.end());
    Rng rng(seed);
    const auto draws = draw_indices(w, t, rng);
    std::vector<double> draw_weight(t);
    for (std::size_t j = 0; j < t; ++j) {
        draw_weight[j] = total_m / (static_cast<double>(m[draws[j]]) * static_cast<double>(t));
    }
    std::vector<double> tau(P.size(), kInf);
    detail::merge_draws(P, draws, draw_weight, tau, out);
    out.draws = t;
    return out;
}

/// Sampled part plus the projection of every point onto B. Thresholds tau_p = dist^z(p, B) / eps^z.
template <class Space>
ThresholdCoreset<PointOf<Space>> metric_b_coreset(const Space& space, const PointSet<PointOf<Space>>& P,
                                                  std::span<const PointOf<Space>> B, std::size_t t, double eps, Power power,
                                                  Seed seed) {
    require(!P.empty() && !B.empty(), "metric_b_coreset: empty input");
    require(t >= 1, "metric_b_coreset: t must be >= 1");
    require(eps > 0.0 && eps < 1.0, "metric_b_coreset: eps must lie in (0,1)");
    require(std::all_of(P.weights.begin(), P.weights.end(), [](double w) { return w >= 0.0; }),
            "metric_b_coreset: multiplicities must be nonnegative");
    power.validate();
    const auto a = detail::assign(space, P, B, power);

    ThresholdCoreset<PointOf<Space>> out;
    out.B.assign(B.begin(), B.end());
    out.power = power;
    out.eps = eps;
    out.n = P.size();
    out.projected.resize(B.size());
    const double scale = std::pow(eps, power.z);

    std::vector<std::vector<std::pair<double, double>>> per_center(B.size());
    if (a.total == 0.0) {
        out.degenerate = true;
        for (std::size_t i = 0; i < P.size(); ++i) {
            per_center[a.owner[i]].push_back({0.0, P.weights[i]});
        }
    } else {
        const double mass = P.total_weight();
        const auto m = sensitivity_multipliers(a.d, P.weights, mass, 1);
        std::vector<double> pick(P.size());
        double total_m = 0.0;
        for (std::size_t i = 0; i < P.size(); ++i) {
            pick[i] = P.weights[i] * static_cast<double>(m[i]);
            total_m += pick[i];
        }
        Rng rng(seed);
        for (std::size_t i : draw_indices(pick, t, rng)) {
            out.sampled.push_back({P.points[i], a.owner[i], total_m / (static_cast<double>(m[i]) * static_cast<double>(t)), a.d[i] / scale});
        }
        for (std::size_t i = 0; i < P.size(); ++i) {
            per_center[a.owner[i]].push_back({a.d[i] / scale, P.weights[i]});
        }
    }
    for (std::size_t b = 0; b < B.size(); ++b) {
        auto& list = per_center[b];
        std::sort(list.begin(), list.end());
        auto& proj = out.projected[b];
        proj.prefix.push_back(0.0);
        for (const auto& [tau, mult] : list) {
            if (!proj.thresholds.empty() && proj.thresholds.back() == tau) {
                proj.prefix.back() += mult;
                continue;
            }
            proj.thresholds.push_back(tau);
            proj.prefix.push_back(proj.prefix.back() + mult);
        }
    }
    return out;
}

/// k-median coreset D = S u B, also accepting real (possibly negative) multiplicities w_q so a
/// weighted coreset can be reduced again. With unit multiplicities it is
/// exactly: m_p = ceil(n d_p / sum d) + 1, draws with probability
/// m_p / sum m, w(p) = sum m / (t m_p), w(b) = (1 + 10 eps)|P_b| - sampled
/// weight in P_b. In general |w_q| plays the role of a multiplicity and the
/// sign is carried onto the sampled weight.
template <class Space>
StaticCoreset<PointOf<Space>> k_median_coreset(const Space& space, const PointSet<PointOf<Space>>& P, std::span<const PointOf<Space>> B,
                                               std::size_t t, double eps, Power power, Seed seed) {
    require(!P.empty() && !B.empty(), "k_median_coreset: empty input");
    require(t >= 1, "k_median_coreset: t must be >= 1");
    require(eps >= 0.0 && eps < 1.0, "k_median_coreset: eps must lie in [0,1)");
    power.validate();
    const auto a = detail::assign(space, P, B, power);

    StaticCoreset<PointOf<Space>> out;
    out.power = power;
    out.eps = eps;
    out.centers = B.size();
    out.input_mass = P.total_weight();

    std::vector<double> cluster_mass(B.size(), 0.0);
    for (std::size_t i = 0; i < P.size(); ++i) {
        cluster_mass[a.owner[i]] += P.weights[i];
    }
    if (a.total == 0.0) {
        out.degenerate = true;
        for (std::size_t b = 0; b < B.size(); ++b) {
            out.points.push_back(B[b], cluster_mass[b]);
            out.thresholds.push_back(kInf);
        }
        out.expected_weight_sum = out.input_mass;
        return out;
    }

    std::vector<double> abs_mass(P.size());
    double total_abs = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        abs_mass[i] = std::abs(P.weights[i]);
        total_abs += abs_mass[i];
    }
    const auto m = sensitivity_multipliers(a.d, abs_mass, total_abs, 1);
    std::vector<double> pick(P.size());
    double total_m = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        pick[i] = abs_mass[i] * static_cast<double>(m[i]);
        total_m += pick[i];
    }
    Rng rng(seed);
    const auto draws = draw_indices(pick, t, rng);
    std::vector<double> draw_weight(t);
    std::vector<double> sampled_in(B.size(), 0.0);
    for (std::size_t j = 0; j < t; ++j) {
        const std::size_t i = draws[j];
        const double sign = P.weights[i] < 0.0 ? -1.0 : 1.0;
        draw_weight[j] = sign * total_m / (static_cast<double>(t) * static_cast<double>(m[i]));
        sampled_in[a.owner[i]] += draw_weight[j];
    }
    const double zscale = std::pow(eps > 0.0 ? eps : 1.0, power.z);
    std::vector<double> tau(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
        tau[i] = a.d[i] / zscale;
    }
    detail::merge_draws(P, draws, draw_weight, tau, out);
    for (std::size_t b = 0; b < B.size(); ++b) {
        out.points.push_back(B[b], center_weight(eps, cluster_mass[b], sampled_in[b]));
        out.thresholds.push_back(kInf);
    }
    out.draws = t;
    out.expected_weight_sum = (1.0 + 10.0 * eps) * out.input_mass;
    return out;
}

/// k_median_coreset for z > 1. Recorded thresholds are
/// (18z)^z dist^z(p, B) / eps^z; they do not change the weights.
template <class Space>
StaticCoreset<PointOf<Space>> power_z_coreset(const Space& space, const PointSet<PointOf<Space>>& P, std::span<const PointOf<Space>> B,
                                              std::size_t t, double eps, Power power, Seed seed) {
    require(power.z > 1.0, "power_z_coreset: needs z > 1");
    auto out = k_median_coreset(space, P, B, t, eps, power, seed);
    const double factor = std::pow(18.0 * power.z, power.z);
    for (auto& tau : out.thresholds) {
        tau *= factor;
    }
    return out;
}

/// ceil(c / eps^2 (k ln n + ln(1/delta))) for a finite metric.
inline std::size_t kmedian_sample_size_metric(std::size_t k, std::size_t n, double eps, double delta, double c) {
    require(eps > 0.0 && delta > 0.0 && delta < 1.0 && c > 0.0, "kmedian_sample_size: bad parameters");
    const double dim = static_cast<double>(k) * std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
    return std::max<std::size_t>(1, ceil_count(c / (eps * eps) * (dim + std::log(1.0 / delta))));
}

/// ceil(c / eps^2 (k d + ln(1/delta))) in R^d.
inline std::size_t kmedian_sample_size_euclidean(std::size_t k, std::size_t d, double eps, double delta, double c) {
    require(eps > 0.0 && delta > 0.0 && delta < 1.0 && c > 0.0, "kmedian_sample_size: bad parameters");
    const double dim = static_cast<double>(k * d);
    return std::max<std::size_t>(1, ceil_count(c / (eps * eps) * (dim + std::log(1.0 / delta))));
}

/// ceil(c / eps^(2z) (dim + k ln k + ln(1/delta))).
inline std::size_t power_z_sample_size(double dim, std::size_t k, double eps, double delta, Power power, double c) {
    require(eps > 0.0 && delta > 0.0 && delta < 1.0 && c > 0.0, "power_z_sample_size: bad parameters");
    const double kk = static_cast<double>(k);
    return std::max<std::size_t>(1, ceil_count(c / std::pow(eps, 2.0 * power.z) * (dim + kk * std::log(kk) + std::log(1.0 / delta))));
}

/// Sample size at which every k_median_coreset weight is nonnegative w.h.p.:
/// ceil(2c|B| / eps^2 (3 ln|B| + ln(1/delta))).
inline std::size_t nonnegativity_sample_size(std::size_t centers, double eps, double delta, double c) {
    require(centers >= 1 && eps > 0.0 && delta > 0.0 && delta < 1.0 && c > 0.0, "nonnegativity_sample_size: bad parameters");
    const double b = static_cast<double>(centers);
    return std::max<std::size_t>(1, ceil_count(2.0 * c * b / (eps * eps) * (3.0 * std::log(b) + std::log(1.0 / delta))));
}

template <class Space>
double eval_coreset_cost(const Space& space, const StaticCoreset<PointOf<Space>>& C, std::span<const PointOf<Space>> x) {
    require(!x.empty(), "empty center set");
    double total = 0.0;
    for (std::size_t i = 0; i < C.points.size(); ++i) {
        total += C.points.weights[i] * dist_pow(space, C.points.points[i], x, C.power);
    }
    return total;
}

template <class Space>
double eval_coreset_cost(const Space& space, const ThresholdCoreset<PointOf<Space>>& C, std::span<const PointOf<Space>> x) {
    require(!x.empty(), "empty center set");
    std::vector<double> center_cost(C.B.size());
    for (std::size_t b = 0; b < C.B.size(); ++b) {
        center_cost[b] = dist_pow(space, C.B[b], x, C.power);
    }
    double total = 0.0;
    for (const auto& s : C.sampled) {
        if (center_cost[s.center] <= s.threshold) {
            total += s.base_weight * dist_pow(space, s.point, x, C.power);
        }
    }
    for (std::size_t b = 0; b < C.B.size(); ++b) {
        const auto& proj = C.projected[b];
        // projections whose threshold lies strictly below their distance
        const auto below = std::lower_bound(proj.thresholds.begin(), proj.thresholds.end(), center_cost[b]) - proj.thresholds.begin();
        total += proj.prefix[static_cast<std::size_t>(below)] * center_cost[b];
    }
    return total;
}

template <class Point>
double min_weight(const StaticCoreset<Point>& C) {
    return C.points.empty() ? 0.0 : *std::min_element(C.points.weights.begin(), C.points.weights.end());
}

/// |sum w - expected| within 1e-9 relative.
template <class Point>
bool weight_sum_holds(const StaticCoreset<Point>& C) {
    const double sum = C.points.total_weight();
    return std::abs(sum - C.expected_weight_sum) <= 1e-9 * std::max(1.0, std::abs(C.expected_weight_sum));
}

/// Relative error of a coreset over a list of queries.
template <class Space, class Coreset>
VerificationReport verify_strong_coreset(const Space& space, const PointSet<PointOf<Space>>& P, const Coreset& C,
                                         const std::vector<CenterSet<Space>>& queries, double eps) {
    require(!queries.empty(), "verify_strong_coreset: no queries");
    VerificationReport report;
    report.check = "strong_coreset";
    report.bound = eps;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const std::span<const PointOf<Space>> x(queries[q]);
        const double exact = cost(space, P, x, C.power);
        const double approx = eval_coreset_cost(space, C, x);
        const double diff = std::abs(exact - approx);
        const double rel = exact > 0.0 ? diff / exact : (diff == 0.0 ? 0.0 : kInf);
        if (q == 0 || rel > report.max_discrepancy) {
            report.max_discrepancy = rel;
            report.argmax_x = q;
            report.argmax_r = exact;
        }
    }
    report.pass = leq_tol(report.max_discrepancy, eps);
    report.params = {{"eps", eps}, {"queries", queries.size()}, {"n", P.size()}};
    return report;
}

}  // namespace kcoreset
