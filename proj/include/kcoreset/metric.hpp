#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kcoreset/error.hpp"
#include "kcoreset/random.hpp"

namespace kcoreset {

using Coords = std::vector<double>;

/// Exponent applied to distances in every cost (z = 1 median, z = 2 means).
struct Power {
    double z = 1.0;

    void validate() const {
        require(std::isfinite(z) && z >= 1.0, "power z must be a finite real >= 1, got " + std::to_string(z));
    }
};

inline double powered(double distance, Power power) {
    if (power.z == 1.0) {
        return distance;
    }
    if (power.z == 2.0) {
        return distance * distance;
    }
    return std::pow(distance, power.z);
}

/// R^d with the Euclidean norm. Centers are arbitrary coordinate vectors.
class EuclideanSpace {
  public:
    using point_type = Coords;

    static constexpr const char* kind = "euclidean";

    explicit EuclideanSpace(std::size_t dim) : dim_(dim) { require(dim > 0, "EuclideanSpace: dimension must be positive"); }

    std::size_t dim() const { return dim_; }

    double distance(const Coords& a, const Coords& b) const {
        if (a.size() != dim_ || b.size() != dim_) {
            throw InputError("dimension mismatch: expected " + std::to_string(dim_) + ", got " +
                             std::to_string(a.size()) + " and " + std::to_string(b.size()));
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double diff = a[i] - b[i];
            sum += diff * diff;
        }
        return std::sqrt(sum);
    }

    void check_point(const Coords& p) const {
        if (p.size() != dim_) {
            throw InputError("dimension mismatch: expected " + std::to_string(dim_) + ", got " + std::to_string(p.size()));
        }
        for (double v : p) {
            if (!std::isfinite(v)) {
                throw InputError("point coordinates must be finite");
            }
        }
    }

  private:
    std::size_t dim_;
};

struct MetricCheck {
    bool ok = true;
    std::size_t triples_checked = 0;
    std::string violation;
};

/// A finite metric space given by an explicit n x n distance table. Points
/// and centers are item indices, so centers are restricted to the items.
class MatrixSpace {
  public:
    using point_type = std::size_t;

    static constexpr const char* kind = "matrix";

    MatrixSpace(std::size_t n, std::vector<double> table) : n_(n), table_(std::make_shared<const std::vector<double>>(std::move(table))) {
        require(n_ > 0, "MatrixSpace: empty metric");
        require(table_->size() == n_ * n_, "MatrixSpace: table is not n x n");
        for (double v : *table_) {
            require(std::isfinite(v) && v >= 0.0, "MatrixSpace: distances must be finite and nonnegative");
        }
    }

    /// Distance table of a Euclidean point set; always a valid metric.
    static MatrixSpace from_points(const std::vector<Coords>& points) {
        require(!points.empty(), "MatrixSpace::from_points: no points");
        const EuclideanSpace euclid(points.front().size());
        const std::size_t n = points.size();
        std::vector<double> table(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = euclid.distance(points[i], points[j]);
                table[i * n + j] = d;
                table[j * n + i] = d;
            }
        }
        return MatrixSpace(n, std::move(table));
    }

    std::size_t size() const { return n_; }

    double distance(std::size_t a, std::size_t b) const {
        if (a >= n_ || b >= n_) {
            throw InputError("metric item index out of range");
        }
        return (*table_)[a * n_ + b];
    }

    void check_point(std::size_t p) const {
        if (p >= n_) {
            throw InputError("metric item index " + std::to_string(p) + " out of range");
        }
    }

    const std::vector<double>& table() const { return *table_; }

    /// Metric axioms. All triples are
    /// checked when n <= exhaustive_limit, otherwise `samples` random triples.
    MetricCheck validate(Seed seed, std::size_t exhaustive_limit = 200, std::size_t samples = 200000, double rel = 1e-9) const {
        MetricCheck check;
        auto fail = [&](std::string what) {
            check.ok = false;
            check.violation = std::move(what);
            return check;
        };
        for (std::size_t i = 0; i < n_; ++i) {
            if (distance(i, i) != 0.0) {
                return fail("nonzero diagonal at " + std::to_string(i));
            }
            for (std::size_t j = i + 1; j < n_; ++j) {
                if (distance(i, j) != distance(j, i)) {
                    return fail("asymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                }
            }
        }
        auto triangle = [&](std::size_t a, std::size_t b, std::size_t c) {
            ++check.triples_checked;
            return leq_tol(distance(a, c), distance(a, b) + distance(b, c), rel);
        };
        if (n_ <= exhaustive_limit) {
            for (std::size_t a = 0; a < n_; ++a) {
                for (std::size_t b = 0; b < n_; ++b) {
                    for (std::size_t c = 0; c < n_; ++c) {
                        if (!triangle(a, b, c)) {
                            return fail("triangle inequality fails at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                                        std::to_string(c) + ")");
                        }
                    }
                }
            }
        } else {
            Rng rng(seed);
            for (std::size_t s = 0; s < samples; ++s) {
                const std::size_t a = rng.below(n_);
                const std::size_t b = rng.below(n_);
                const std::size_t c = rng.below(n_);
                if (!triangle(a, b, c)) {
                    return fail("triangle inequality fails at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                                std::to_string(c) + ")");
                }
            }
        }
        return check;
    }

  private:
    std::size_t n_;
    std::shared_ptr<const std::vector<double>> table_;
};

template <class Space>
using PointOf = typename Space::point_type;

template <class Space>
using CenterSet = std::vector<PointOf<Space>>;

/// Indexed points with per-point multiplicities. A point's index is its
/// position. Multiplicities are real so weighted coresets can be fed back
/// into the same algorithms.
template <class Point>
struct PointSet {
    std::vector<Point> points;
    std::vector<double> weights;

    PointSet() = default;

    explicit PointSet(std::vector<Point> pts) : points(std::move(pts)), weights(points.size(), 1.0) {}

    PointSet(std::vector<Point> pts, std::vector<double> w) : points(std::move(pts)), weights(std::move(w)) {
        require(points.size() == weights.size(), "PointSet: weights and points differ in length");
    }

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    void push_back(Point p, double weight = 1.0) {
        points.push_back(std::move(p));
        weights.push_back(weight);
    }

    double total_weight() const {
        double total = 0.0;
        for (double w : weights) {
            total += w;
        }
        return total;
    }

    bool unit_weights() const {
        return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 1.0; });
    }

    PointSet subset(std::span<const std::size_t> indices) const {
        PointSet out;
        out.points.reserve(indices.size());
        out.weights.reserve(indices.size());
        for (std::size_t i : indices) {
            out.push_back(points.at(i), weights.at(i));
        }
        return out;
    }
};

/// The n items of a finite metric, each with multiplicity one.
inline PointSet<std::size_t> all_items(const MatrixSpace& space) {
    std::vector<std::size_t> items(space.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        items[i] = i;
    }
    return PointSet<std::size_t>(std::move(items));
}

struct Nearest {
    std::size_t index = 0;
    double distance = 0.0;
};

/// Closest center; ties go to the lowest center index.
template <class Space>
Nearest nearest_center(const Space& space, const PointOf<Space>& p, std::span<const PointOf<Space>> centers) {
    if (centers.empty()) {
        throw InputError("empty center set");
    }
    Nearest best{0, space.distance(p, centers[0])};
    for (std::size_t i = 1; i < centers.size(); ++i) {
        const double d = space.distance(p, centers[i]);
        if (d < best.distance) {
            best = {i, d};
        }
    }
    return best;
}

template <class Space>
double dist_pow(const Space& space, const PointOf<Space>& p, std::span<const PointOf<Space>> centers, Power power) {
    return powered(nearest_center(space, p, centers).distance, power);
}

/// Sum over P of multiplicity * dist^z(p, x).
template <class Space>
double cost(const Space& space, const PointSet<PointOf<Space>>& points, std::span<const PointOf<Space>> centers, Power power) {
    if (points.empty()) {
        throw InputError("cost of an empty point set");
    }
    if (centers.empty()) {
        throw InputError("empty center set");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        total += points.weights[i] * dist_pow(space, points.points[i], centers, power);
    }
    return total;
}

/// Cost(P, Y): every point pays its cheapest center in Y. Numerically the
/// same sum as cost(); kept separate because Y is a set of candidate
/// centers rather than a k-tuple query.
template <class Space>
double cost_to_set(const Space& space, const PointSet<PointOf<Space>>& points, std::span<const PointOf<Space>> set, Power power) {
    if (set.empty()) {
        throw InputError("cost_to_set: empty center set");
    }
    return cost(space, points, set, power);
}

/// proj(p, B) for every p, keeping multiplicities.
template <class Space>
PointSet<PointOf<Space>> project(const Space& space, const PointSet<PointOf<Space>>& points, std::span<const PointOf<Space>> centers) {
    if (centers.empty()) {
        throw InputError("project: empty center set");
    }
    PointSet<PointOf<Space>> out;
    out.points.reserve(points.size());
    out.weights = points.weights;
    for (const auto& p : points.points) {
        out.points.push_back(centers[nearest_center(space, p, centers).index]);
    }
    return out;
}

/// Index of the nearest center for each point.
template <class Space>
std::vector<std::size_t> assign_nearest(const Space& space, const PointSet<PointOf<Space>>& points, std::span<const PointOf<Space>> centers) {
    std::vector<std::size_t> owner(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        owner[i] = nearest_center(space, points.points[i], centers).index;
    }
    return owner;
}

/// P_b for each b in B, as point indices. Same tie rule as project().
template <class Space>
std::vector<std::vector<std::size_t>> partition_by_nearest(const Space& space, const PointSet<PointOf<Space>>& points,
                                                           std::span<const PointOf<Space>> centers) {
    if (centers.empty()) {
        throw InputError("partition_by_nearest: empty center set");
    }
    std::vector<std::vector<std::size_t>> clusters(centers.size());
    const auto owner = assign_nearest(space, points, centers);
    for (std::size_t i = 0; i < owner.size(); ++i) {
        clusters[owner[i]].push_back(i);
    }
    return clusters;
}

/// Removes exact duplicates, keeping first occurrences in order.
template <class Point>
std::vector<Point> unique_points(std::vector<Point> points) {
    std::vector<Point> out;
    out.reserve(points.size());
    for (auto& p : points) {
        if (std::find(out.begin(), out.end(), p) == out.end()) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace kcoreset
