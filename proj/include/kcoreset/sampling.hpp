#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/random.hpp"
#include "kcoreset/report.hpp"

namespace kcoreset {

struct SampleParams {
    double eps = 0.1;
    double delta = 0.1;
    std::size_t dim = 1;
    double c = 1.0;  // the "sufficiently large constant"; calibrated, not derived

    void validate() const {
        require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
        require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
        require(dim >= 1, "dimension bound must be >= 1");
        require(c > 0.0 && std::isfinite(c), "c must be positive");
    }
};

/// ceil(x) that ignores representation noise just above an integer.
inline std::size_t ceil_count(double x) {
    if (x <= 0.0) {
        return 0;
    }
    return static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

/// ceil((c/eps^2)(dim + ln(1/delta))).
inline std::size_t eps_approx_sample_size(const SampleParams& params) {
    params.validate();
    const double size = params.c / (params.eps * params.eps) * (static_cast<double>(params.dim) + std::log(1.0 / params.delta));
    return std::max<std::size_t>(1, ceil_count(size));
}

/// t draws with replacement, proportional to the given nonnegative weights.
inline std::vector<std::size_t> draw_indices(std::span<const double> weights, std::size_t t, Rng& rng) {
    require(!weights.empty(), "cannot sample from an empty set");
    std::vector<std::size_t> out;
    out.reserve(t);
    const bool uniform = std::all_of(weights.begin(), weights.end(), [&](double w) { return w == weights.front(); });
    if (uniform) {
        require(weights.front() > 0.0, "cannot sample: all weights are zero");
        for (std::size_t i = 0; i < t; ++i) {
            out.push_back(rng.below(weights.size()));
        }
        return out;
    }
    const AliasTable table(weights);
    for (std::size_t i = 0; i < t; ++i) {
        out.push_back(table.draw(rng));
    }
    return out;
}

/// Uniform i.i.d. sample respecting multiplicities. t = 0 gives an empty set.
template <class Point>
PointSet<Point> iid_sample(const PointSet<Point>& P, std::size_t t, Seed seed) {
    require(!P.empty(), "iid_sample: empty point set");
    Rng rng(seed);
    const auto picks = draw_indices(P.weights, t, rng);
    std::vector<Point> pts;
    pts.reserve(t);
    for (std::size_t i : picks) {
        pts.push_back(P.points[i]);
    }
    return PointSet<Point>(std::move(pts));
}

template <class Point>
struct WeightedSample {
    PointSet<Point> sample;
    std::vector<std::size_t> source;  // index in P of each draw
};

/// t draws, point p with probability m_p / sum m.
template <class Point>
WeightedSample<Point> weighted_iid_sample(const PointSet<Point>& P, std::span<const std::uint64_t> m, std::size_t t, Seed seed) {
    require(!P.empty(), "weighted_iid_sample: empty point set");
    require(m.size() == P.size(), "weighted_iid_sample: one weight per point required");
    std::vector<double> w(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        require(m[i] >= 1, "weighted_iid_sample: weights must be positive integers");
        w[i] = static_cast<double>(m[i]);
    }
    Rng rng(seed);
    WeightedSample<Point> out;
    out.source = draw_indices(w, t, rng);
    for (std::size_t i : out.source) {
        out.sample.push_back(P.points[i]);
    }
    return out;
}

/// values[x][i] = f_i(x) over a finite grid of queries x.
using ValueGrid = std::vector<std::vector<double>>;

namespace detail {

inline void check_grid(const ValueGrid& values, std::span<const double> f_weights, std::span<const std::size_t> sample) {
    require(!values.empty(), "empty query grid");
    const std::size_t n = values.front().size();
    require(n > 0, "empty function set");
    require(!sample.empty(), "the subset S must be nonempty");
    require(f_weights.empty() || f_weights.size() == n, "one multiplicity per function required");
    for (const auto& row : values) {
        require(row.size() == n, "ragged value grid");
        for (double v : row) {
            require(v >= 0.0 && std::isfinite(v), "function values must be finite and nonnegative");
        }
    }
    for (std::size_t s : sample) {
        require(s < n, "sample index out of range");
    }
}

struct ThresholdScan {
    double worst = 0.0;
    double at_r = 0.0;
};

// Walks the distinct values of one grid row in increasing order; the
// discrepancy is a step function of r, so these thresholds (plus one below
// the minimum, where both sides are zero) cover every range.
inline ThresholdScan scan_row(const std::vector<double>& row, std::span<const double> f_weights,
                              const std::vector<double>& s_count, double s_size, bool normalized) {
    const std::size_t n = row.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b] || (row[a] == row[b] && a < b); });
    double f_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f_total += f_weights.empty() ? 1.0 : f_weights[i];
    }
    ThresholdScan scan;
    scan.at_r = row[order.front()] - 1.0;
    double f_acc = 0.0;
    double s_acc = 0.0;
    for (std::size_t pos = 0; pos < n;) {
        const double r = row[order[pos]];
        while (pos < n && row[order[pos]] == r) {
            const std::size_t i = order[pos];
            const double fw = f_weights.empty() ? 1.0 : f_weights[i];
            f_acc += normalized ? fw * r : fw;
            s_acc += normalized ? s_count[i] * r : s_count[i];
            ++pos;
        }
        if (normalized && r == 0.0) {
            continue;  // both sides are sums of zeros
        }
        double d = std::abs(f_acc / f_total - s_acc / s_size);
        if (normalized) {
            d /= r;
        }
        if (d > scan.worst) {
            scan.worst = d;
            scan.at_r = r;
        }
    }
    return scan;
}

inline VerificationReport verify_grid(const ValueGrid& values, std::span<const double> f_weights, std::span<const std::size_t> sample,
                                      double eps, bool normalized) {
    check_grid(values, f_weights, sample);
    std::vector<double> s_count(values.front().size(), 0.0);
    for (std::size_t s : sample) {
        s_count[s] += 1.0;
    }
    VerificationReport report;
    report.check = normalized ? "function_eps_approx" : "range_eps_approx";
    report.bound = eps;
    for (std::size_t x = 0; x < values.size(); ++x) {
        const auto scan = scan_row(values[x], f_weights, s_count, static_cast<double>(sample.size()), normalized);
        if (x == 0 || scan.worst > report.max_discrepancy) {
            report.max_discrepancy = scan.worst;
            report.argmax_x = x;
            report.argmax_r = scan.at_r;
        }
    }
    report.pass = leq_tol(report.max_discrepancy, eps);
    report.params = {{"eps", eps}, {"n", values.front().size()}, {"sample_size", sample.size()}, {"grid_size", values.size()}};
    return report;
}

}  // namespace detail

/// max over grid x and thresholds r of | |range|/|F| - |S ∩ range|/|S| |,
/// range = {f : f(x) <= r}. S is a multiset of indices into F; f_weights
/// (optional) are multiplicities of the functions in F.
inline VerificationReport verify_range_eps_approx(const ValueGrid& values, std::span<const std::size_t> sample, double eps,
                                                  std::span<const double> f_weights = {}) {
    return detail::verify_grid(values, f_weights, sample, eps, false);
}

/// Same ranges, comparing average cost inside the range and dividing by r.
inline VerificationReport verify_function_eps_approx(const ValueGrid& values, std::span<const std::size_t> sample, double eps,
                                                     std::span<const double> f_weights = {}) {
    return detail::verify_grid(values, f_weights, sample, eps, true);
}

/// f_p(x) = dist^z(p, x) for every point p and every query x.
template <class Space>
ValueGrid distance_grid(const Space& space, const PointSet<PointOf<Space>>& P, const std::vector<CenterSet<Space>>& queries, Power power) {
    ValueGrid grid;
    grid.reserve(queries.size());
    for (const auto& x : queries) {
        std::vector<double> row;
        row.reserve(P.size());
        for (const auto& p : P.points) {
            row.push_back(dist_pow(space, p, std::span<const PointOf<Space>>(x), power));
        }
        grid.push_back(std::move(row));
    }
    return grid;
}

}  // namespace kcoreset
