#pragma once

#include <vector>

#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/random.hpp"

namespace kcoreset {

/// n points from `clusters` isotropic Gaussians with unit deviation whose
/// means are spread uniformly in [-separation, separation]^dim.
inline std::vector<Coords> gaussian_mixture(std::size_t n, std::size_t dim, std::size_t clusters, double separation, Seed seed) {
    require(n > 0 && dim > 0 && clusters > 0, "gaussian_mixture: sizes must be positive");
    Rng rng(seed);
    std::vector<Coords> means(clusters, Coords(dim));
    for (auto& mean : means) {
        for (auto& v : mean) {
            v = separation * (2.0 * rng.uniform() - 1.0);
        }
    }
    std::vector<Coords> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& mean = means[rng.below(clusters)];
        Coords p(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            p[j] = mean[j] + rng.normal();
        }
        points.push_back(std::move(p));
    }
    return points;
}

inline std::vector<Coords> uniform_box(std::size_t n, std::size_t dim, double side, Seed seed) {
    require(n > 0 && dim > 0, "uniform_box: sizes must be positive");
    Rng rng(seed);
    std::vector<Coords> points(n, Coords(dim));
    for (auto& p : points) {
        for (auto& v : p) {
            v = side * rng.uniform();
        }
    }
    return points;
}

}  // namespace kcoreset
