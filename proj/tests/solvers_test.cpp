#include <gtest/gtest.h>

#include "support/instances.hpp"

using namespace kctest;

namespace {

const EuclideanSpace R1(1);
const EuclideanSpace R2(2);

}  // namespace

TEST(BruteForce, LineExamples) {
    const auto P = line({0, 1, 10});
    const auto two = brute_force_k_median(R1, P, 2, view(P.points), Power{1});
    EXPECT_DOUBLE_EQ(two.cost, 1.0);
    EXPECT_EQ(two.centers, line_centers({0, 10}));
    const auto one = brute_force_k_median(R1, P, 1, view(P.points), Power{1});
    EXPECT_EQ(one.centers, line_centers({1}));
    EXPECT_DOUBLE_EQ(one.cost, 10.0);
    EXPECT_EQ(brute_force_k_median(R1, P, 3, view(P.points), Power{1}).cost, 0.0);
}

TEST(BruteForce, AgreesWithNaiveEnumeration) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const PointSet<Coords> P(uniform_box(12, 2, 1.0, Seed{s}));
        for (std::size_t k = 1; k <= 3; ++k) {
            EXPECT_NEAR(brute_force_k_median(R2, P, k, view(P.points), Power{1}).cost, naive_optimum(R2, P, k), 1e-12);
        }
    }
}

TEST(BruteForce, RefusesHugeSearches) {
    const PointSet<Coords> P(uniform_box(300, 1, 1.0, Seed{1}));
    EXPECT_THROW(brute_force_k_median(R1, P, 3, view(P.points), Power{1}), ComputationRefused);
    EXPECT_THROW(brute_force_k_median(R1, P, 0, view(P.points), Power{1}), InputError);
    EXPECT_DOUBLE_EQ(combinations(5, 2), 10.0);
}

TEST(LocalSearch, OptimalStartMakesNoSwaps) {
    const PointSet<Coords> P(uniform_box(15, 2, 1.0, Seed{3}));
    const auto best = brute_force_k_median(R2, P, 2, view(P.points), Power{1});
    LocalSearchOptions options;
    options.start = best.candidate_index;
    const auto r = weighted_local_search(R2, P, 2, view(P.points), Power{1}, Seed{1}, options);
    EXPECT_EQ(r.swaps, 0u);
    EXPECT_DOUBLE_EQ(r.cost, best.cost);
}

TEST(LocalSearch, WithinFiveOfOptimum) {
    int exact = 0;
    int runs = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const PointSet<Coords> P(uniform_box(6 + s % 7, 2, 1.0, Seed{s}));
        for (std::size_t k = 1; k <= 2; ++k) {
            const double opt = brute_force_k_median(R2, P, k, view(P.points), Power{1}).cost;
            const double got = weighted_local_search(R2, P, k, view(P.points), Power{1}, Seed{s + 100}).cost;
            EXPECT_LE(got, 5.0 * opt + 1e-12);
            exact += std::abs(got - opt) <= 1e-12 * std::max(1.0, opt) ? 1 : 0;
            ++runs;
        }
    }
    RecordProperty("exact_matches", exact);
    RecordProperty("runs", runs);
}

TEST(LocalSearch, EachSwapLowersTheCost) {
    const PointSet<Coords> P(uniform_box(80, 2, 1.0, Seed{9}));
    double previous = std::numeric_limits<double>::infinity();
    std::size_t last_swaps = 0;
    for (std::size_t budget = 0; budget < 12; ++budget) {
        LocalSearchOptions options;
        options.max_swaps = budget;
        const auto r = weighted_local_search(R2, P, 4, view(P.points), Power{1}, Seed{5}, options);
        if (budget > 0 && r.swaps > last_swaps) {
            EXPECT_LT(r.cost, previous);
        }
        previous = r.cost;
        last_swaps = r.swaps;
    }
}

TEST(LocalSearch, WeightsAreRespected) {
    // a heavy point pulls the single center onto itself
    const PointSet<Coords> P({{0.0}, {1.0}, {2.0}, {10.0}}, {1.0, 1.0, 1.0, 100.0});
    const auto r = weighted_local_search(R1, P, 1, view(P.points), Power{1}, Seed{1});
    EXPECT_EQ(r.centers, line_centers({10}));
}

TEST(ConstantFactor, SeparatedClusters) {
    std::vector<Coords> pts;
    Rng rng(Seed{2});
    for (const auto& m : std::vector<Coords>{{0, 0}, {50, 0}, {0, 50}}) {
        for (int i = 0; i < 7; ++i) {
            pts.push_back({m[0] + rng.uniform(), m[1] + rng.uniform()});
        }
    }
    const PointSet<Coords> P(pts);
    const double opt = naive_optimum(R2, P, 3);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto r = constant_factor_metric_kmedian(R2, P, 3, 0.3, 0.1, Seed{s});
        EXPECT_EQ(r.centers.size(), 3u);
        EXPECT_LE(r.cost, 10.0 * opt);
    }
}

TEST(ConstantFactor, TrivialAndDeterministic) {
    const PointSet<Coords> P(uniform_box(4, 2, 1.0, Seed{1}));
    EXPECT_EQ(constant_factor_metric_kmedian(R2, P, 4, 0.3, 0.1, Seed{1}).cost, 0.0);
    const PointSet<Coords> Q(uniform_box(200, 2, 1.0, Seed{2}));
    const auto a = constant_factor_metric_kmedian(R2, Q, 3, 0.3, 0.1, Seed{7});
    const auto b = constant_factor_metric_kmedian(R2, Q, 3, 0.3, 0.1, Seed{7});
    EXPECT_EQ(a.centers, b.centers);
    EXPECT_EQ(a.cost, b.cost);
}

TEST(ConstantFactor, MetricSpace) {
    const auto M = random_metric(20, Seed{4});
    const auto P = all_items(M);
    const double opt = naive_optimum(M, P, 2);
    const auto r = constant_factor_metric_kmedian(M, P, 2, 0.3, 0.1, Seed{1});
    EXPECT_LE(r.cost, 10.0 * opt);
}
