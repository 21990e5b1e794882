#include <gtest/gtest.h>

#include "support/instances.hpp"

using namespace kctest;

namespace {

const EuclideanSpace R2(2);

template <class Point>
CoresetFile<Point> wrap(std::variant<StaticCoreset<Point>, ThresholdCoreset<Point>> C) {
    CoresetFile<Point> file;
    file.coreset = std::move(C);
    file.provenance.seed = Seed{42};
    file.provenance.params = {{"k", 3}};
    file.provenance.bicriteria_cost = 1.25;
    file.provenance.input_fingerprint = "00ff";
    file.dim = 2;
    return file;
}

}  // namespace

TEST(CoresetJson, StaticRoundTripIsByteIdentical) {
    const PointSet<Coords> P(uniform_box(40, 2, 1.0, Seed{1}));
    CoresetConfig cfg;
    cfg.k = 2;
    const auto built = build_strong_coreset(R2, P, cfg, Seed{3});
    const auto text = to_json(wrap<Coords>(built.coreset)).dump(1);
    const auto back = coreset_from_json<Coords>(nlohmann::json::parse(text));
    EXPECT_EQ(to_json(back).dump(1), text);
    const auto& C = std::get<StaticCoreset<Coords>>(back.coreset);
    EXPECT_EQ(C.points.weights, built.coreset.points.weights);
    EXPECT_EQ(back.provenance.seed.value, 42u);
}

TEST(CoresetJson, ThresholdRoundTripIsByteIdentical) {
    const PointSet<Coords> P(uniform_box(40, 2, 1.0, Seed{2}));
    const std::vector<Coords> B = {P.points[0], P.points[1]};
    const auto T = metric_b_coreset(R2, P, std::span<const Coords>(B), 30, 0.2, Power{1}, Seed{4});
    const auto text = to_json(wrap<Coords>(T)).dump(1);
    const auto back = coreset_from_json<Coords>(nlohmann::json::parse(text));
    EXPECT_EQ(to_json(back).dump(1), text);
    const auto& U = std::get<ThresholdCoreset<Coords>>(back.coreset);
    for (const auto& x : random_queries(P, 2, 10, Seed{5})) {
        EXPECT_EQ(eval_coreset_cost(R2, U, view(x)), eval_coreset_cost(R2, T, view(x)));
    }
}

TEST(CoresetJson, MatrixCoresetUsesIndices) {
    const auto M = random_metric(30, Seed{1});
    const auto P = all_items(M);
    CoresetConfig cfg;
    cfg.k = 2;
    const auto built = build_strong_coreset(M, P, cfg, Seed{1});
    const auto j = to_json(wrap<std::size_t>(built.coreset));
    EXPECT_EQ(j.at("space"), "matrix");
    EXPECT_TRUE(j.at("points").front().contains("index"));
    EXPECT_THROW(coreset_from_json<Coords>(j), ValidationError);
}

TEST(CoresetJson, InfiniteThresholdsAreNull) {
    StaticCoreset<Coords> C;
    C.points.push_back({0.0, 0.0}, 2.0);
    C.thresholds.push_back(kInf);
    const auto j = to_json(wrap<Coords>(C));
    EXPECT_TRUE(j.at("points").front().at("threshold").is_null());
    const auto back = coreset_from_json<Coords>(j);
    EXPECT_EQ(std::get<StaticCoreset<Coords>>(back.coreset).thresholds.front(), kInf);
}

TEST(CoresetJson, MalformedFilesAreRejected) {
    StaticCoreset<Coords> C;
    C.points.push_back({0.0, 0.0}, 1.0);
    C.thresholds.push_back(1.0);
    auto j = to_json(wrap<Coords>(C));
    auto missing = j;
    missing.erase("stats");
    EXPECT_THROW(coreset_from_json<Coords>(missing), IoError);
    auto wrong_type = j;
    wrong_type["type"] = "fancy";
    EXPECT_THROW(coreset_from_json<Coords>(wrong_type), ValidationError);
    auto bad_z = j;
    bad_z["z"] = 0.5;
    EXPECT_THROW(coreset_from_json<Coords>(bad_z), InputError);
}
