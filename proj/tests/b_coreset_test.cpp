#include <gtest/gtest.h>

#include "support/instances.hpp"

using namespace kctest;

namespace {

using Query = double;

// f_i(x) = |p_i - x| on a line, partner f'_i(x) = |q_i - x|.
FunctionFamily<Query> line_family(std::vector<double> p, std::vector<double> q) {
    FunctionFamily<Query> F;
    F.size = p.size();
    F.f = [p](std::size_t i, const Query& x) { return std::abs(p[i] - x); };
    F.f_prime = [q](std::size_t i, const Query& x) { return std::abs(q[i] - x); };
    return F;
}

std::vector<double> grid(double lo, double hi, std::size_t count) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < count; ++i) {
        xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return xs;
}

}  // namespace

TEST(BCoreset, TakeEverythingIsExact) {
    Rng rng(Seed{1});
    for (int inst = 0; inst < 20; ++inst) {
        std::vector<double> p(15), q(15);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = rng.uniform() * 10.0;
            q[i] = rng.uniform() * 10.0;
        }
        auto F = line_family(p, q);
        F.m.assign(p.size(), 1);
        const auto C = b_coreset(F, take_all());
        EXPECT_EQ(C.scale(), 1.0);
        for (double x : grid(-5, 15, 100)) {
            const double exact = family_cost(F, x);
            EXPECT_NEAR(C.cost(x), exact, 1e-12 * std::max(1.0, exact));
            EXPECT_EQ(C.cost_T(x), 0.0);
        }
    }
}

TEST(BCoreset, ZeroThresholdSendsEverythingToPartners) {
    auto F = line_family({1, 2, 3}, {1.5, 2.5, 3.5});
    F.s = [](std::size_t, const Query&) { return 0.0; };
    const auto C = b_coreset(F, take_all());
    for (double x : grid(5, 9, 10)) {
        EXPECT_EQ(C.cost_U(x), 0.0);
        EXPECT_DOUBLE_EQ(C.cost(x), std::abs(1.5 - x) + std::abs(2.5 - x) + std::abs(3.5 - x));
    }
}

TEST(BCoreset, ErrorWithinBoundOnFivePoints) {
    const std::vector<double> p = {0, 1, 2, 6, 7};
    const std::vector<double> q = {1, 1, 1, 6.5, 6.5};
    auto F = line_family(p, q);
    F.s = [p, q](std::size_t i, const Query&) { return std::abs(p[i] - q[i]) / 0.2; };
    F.m = {2, 1, 3, 2, 2};
    const auto exact = b_coreset(F, take_all());
    for (double x : grid(-10, 20, 100)) {
        const auto e = b_coreset_error_bound(exact, x);
        EXPECT_EQ(e.eps, 0.0);
        EXPECT_LE(e.error, e.bound + 1e-12);
        EXPECT_NEAR(e.error, std::abs(family_cost(F, x) - exact.cost(x)), 1e-12);
        EXPECT_TRUE(e.assumption_holds);
    }
    const auto sampled = b_coreset(F, iid_eps_approx(SampleParams{0.3, 0.1, 2, 1.0}, Seed{4}));
    for (double x : grid(-10, 20, 100)) {
        const auto e = b_coreset_error_bound(sampled, x);
        EXPECT_LE(e.error, e.bound * (1.0 + 1e-9) + 1e-12) << "x " << x;
    }
}

TEST(BCoreset, MeasuredBoundHoldsOnRandomFamilies) {
    Rng rng(Seed{2});
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 30;
        std::vector<double> p(n), q(n);
        std::vector<std::uint64_t> m(n);
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = rng.below(3) * 10.0;
            p[i] = q[i] + rng.normal();
            m[i] = 1 + rng.below(4);
        }
        auto F = line_family(p, q);
        F.s = [p, q](std::size_t i, const Query&) { return std::abs(p[i] - q[i]) / 0.25; };
        F.m = m;
        const auto C = b_coreset(F, iid_eps_approx(SampleParams{0.3, 0.1, 1, 1.0}, Seed{static_cast<std::uint64_t>(inst)}));
        for (double x : grid(-15, 35, 60)) {
            const auto e = b_coreset_error_bound(C, x);
            EXPECT_TRUE(e.assumption_holds);
            EXPECT_LE(e.error, e.bound * (1.0 + 1e-9) + 1e-12) << "instance " << inst << " x " << x;
        }
    }
}

TEST(BCoreset, RejectsBadFamilies) {
    FunctionFamily<Query> empty;
    EXPECT_THROW(b_coreset(empty, take_all()), InputError);
    auto F = line_family({1, 2}, {1, 2});
    F.m = {1, 0};
    EXPECT_THROW(b_coreset(F, take_all()), InputError);
    F.m = {1};
    EXPECT_THROW(b_coreset(F, take_all()), InputError);
}
