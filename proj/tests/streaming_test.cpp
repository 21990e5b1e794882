#include <gtest/gtest.h>

#include "support/instances.hpp"

using namespace kctest;

namespace {

const EuclideanSpace R2(2);

StreamConfig small_config(std::size_t block) {
    StreamConfig c;
    c.k = 2;
    c.eps = 0.3;
    c.block_size = block;
    return c;
}

std::vector<bool> bits_of(std::size_t v) {
    std::vector<bool> bits;
    while (v > 0) {
        bits.push_back(v & 1);
        v >>= 1;
    }
    return bits;
}

}  // namespace

TEST(Stream, ExactBeforeTheFirstBlock) {
    MergeReduceStream<EuclideanSpace> stream(R2, small_config(64), Seed{1});
    const auto pts = uniform_box(50, 2, 1.0, Seed{2});
    for (const auto& p : pts) {
        stream.push(p);
    }
    const PointSet<Coords> P(pts);
    for (const auto& x : random_queries(P, 2, 10, Seed{3})) {
        EXPECT_DOUBLE_EQ(stream.query(view(x)), cost(R2, P, view(x), Power{1}));
    }
    EXPECT_TRUE(stream.occupancy().empty());
}

TEST(Stream, TwoBlocksMakeOneCarry) {
    MergeReduceStream<EuclideanSpace> stream(R2, small_config(32), Seed{1});
    for (const auto& p : uniform_box(64, 2, 1.0, Seed{2})) {
        stream.push(p);
    }
    EXPECT_EQ(stream.occupancy(), (std::vector<bool>{false, true}));
    EXPECT_EQ(stream.builds(), 3u);
    EXPECT_TRUE(stream.buffer().empty());
}

TEST(Stream, OccupancyIsBinaryCounter) {
    MergeReduceStream<EuclideanSpace> stream(R2, small_config(16), Seed{5});
    const auto pts = uniform_box(16 * 37, 2, 1.0, Seed{6});
    for (std::size_t i = 0; i < pts.size(); ++i) {
        stream.push(pts[i]);
        ASSERT_EQ(stream.occupancy(), bits_of((i + 1) / 16)) << "after " << i + 1 << " points";
        ASSERT_LE(stream.stored_points(), 16 * (stream.level_bound() + 1));
    }
}

TEST(Stream, FullSizeOccupancy) {
    MergeReduceStream<EuclideanSpace> stream(R2, small_config(256), Seed{7});
    for (const auto& p : gaussian_mixture(4096, 2, 2, 10.0, Seed{8})) {
        stream.push(p);
    }
    EXPECT_EQ(stream.occupancy(), bits_of(16));
    EXPECT_LE(stream.stored_points(), 256u * (stream.level_bound() + 1));
    EXPECT_NEAR(stream.stored_weight(), stream.nominal_weight(), 1e-9 * stream.nominal_weight());
}

TEST(Stream, IdenticalPointsStayExact) {
    MergeReduceStream<EuclideanSpace> stream(R2, small_config(16), Seed{1});
    for (int i = 0; i < 200; ++i) {
        stream.push({1.0, 2.0});
    }
    const std::vector<Coords> x = {{1.0, 2.0}};
    EXPECT_EQ(stream.query(view(x)), 0.0);
}

TEST(Stream, ReplayIsExact) {
    const auto pts = gaussian_mixture(700, 2, 2, 5.0, Seed{3});
    MergeReduceStream<EuclideanSpace> a(R2, small_config(64), Seed{11});
    MergeReduceStream<EuclideanSpace> b(R2, small_config(64), Seed{11});
    for (const auto& p : pts) {
        a.push(p);
        b.push(p);
    }
    ASSERT_EQ(a.levels().size(), b.levels().size());
    for (std::size_t l = 0; l < a.levels().size(); ++l) {
        ASSERT_EQ(a.levels()[l].has_value(), b.levels()[l].has_value());
        if (a.levels()[l]) {
            EXPECT_EQ(a.levels()[l]->coreset.points.points, b.levels()[l]->coreset.points.points);
            EXPECT_EQ(a.levels()[l]->coreset.points.weights, b.levels()[l]->coreset.points.weights);
        }
    }
}

TEST(Stream, CloseToBatchCost) {
    const auto pts = gaussian_mixture(2048, 2, 2, 10.0, Seed{4});
    const PointSet<Coords> P(pts);
    MergeReduceStream<EuclideanSpace> stream(R2, small_config(256), Seed{4});
    for (const auto& p : pts) {
        stream.push(p);
    }
    for (const auto& x : random_queries(P, 2, 50, Seed{5})) {
        const double batch = cost(R2, P, view(x), Power{1});
        EXPECT_LE(std::abs(stream.query(view(x)) - batch) / batch, 0.5);
    }
}

TEST(Stream, RejectsBadConfigAndPoints) {
    EXPECT_THROW(MergeReduceStream<EuclideanSpace>(R2, small_config(4), Seed{1}), InputError);
    MergeReduceStream<EuclideanSpace> stream(R2, small_config(16), Seed{1});
    EXPECT_THROW(stream.push({1.0}), InputError);
    const std::vector<Coords> x = {{0.0, 0.0}};
    EXPECT_THROW(stream.query(view(x)), InputError);
}
