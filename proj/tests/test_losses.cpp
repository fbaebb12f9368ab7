#include "doctest.h"

#include "silt/losses.hpp"
#include "silt/topology.hpp"
#include "support.hpp"

using namespace silt;

TEST_CASE("squared-Euclidean point-set chamfer on singletons and pairs") {
    CHECK(chamfer_pointset({{0, 0}}, {{3, 4}}).raw == doctest::Approx(50.0));
    const std::vector<PixelPoint> set = {{1, 2}, {4, 0}, {2, 2}};
    CHECK(chamfer_pointset(set, set).raw == doctest::Approx(0.0));
    // Brute-force derived: (1+1) one way plus 1 back.
    CHECK(chamfer_pointset({{0, 0}, {0, 2}}, {{0, 1}}).raw == doctest::Approx(3.0));

    CHECK_THROWS_AS(chamfer_pointset({}, {{0, 0}}), Error);
    CHECK_THROWS_AS(chamfer_pointset({{0, 0}}, {}), Error);
}

TEST_CASE("L-infinity point-set chamfer") {
    CHECK(chamfer_pointset_linf({{0, 0}}, {{3, 4}}).raw == doctest::Approx(8.0));
    const std::vector<PixelPoint> set = {{5, 5}, {1, 0}};
    CHECK(chamfer_pointset_linf(set, set).raw == doctest::Approx(0.0));
    CHECK(chamfer_pointset_linf({{2, 2}}, {{2, 5}}).raw == doctest::Approx(6.0));
}

TEST_CASE("spatial chamfer equals the hand casework") {
    BinaryMask x(8, 8), y(8, 8);
    x.set(2, 2, 1);
    y.set(2, 5, 1);
    CHECK(spatial_chamfer(x, y).raw == doctest::Approx(6.0));
    CHECK(spatial_chamfer(x, x).raw == doctest::Approx(0.0));
}

TEST_CASE("spatial chamfer errors on empty or mismatched masks") {
    BinaryMask x(4, 4), y(4, 4);
    y.set(0, 0, 1);
    CHECK_THROWS_AS(spatial_chamfer(x, y), Error);
    CHECK_THROWS_AS(spatial_chamfer(y, x), Error);
    CHECK_THROWS_AS(spatial_chamfer(y, BinaryMask(5, 4, 1)), Error);
}

TEST_CASE("spatial chamfer equals the L-infinity point-set oracle exactly") {
    Rng rng(211);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 6 + static_cast<int>(rng.below(26));
        const int h = 6 + static_cast<int>(rng.below(18));
        BinaryMask x, y;
        switch (trial % 3) {
            case 0:
                x = testing::nonempty_noise(rng, w, h, 0.3);
                y = testing::nonempty_noise(rng, w, h, 0.3);
                break;
            case 1:
                x = testing::nonempty_blob(rng, w, h);
                y = testing::nonempty_blob(rng, w, h);
                break;
            default:
                // Skeleton outputs exercise sparse ridge-like sets.
                x = skeletonize(testing::nonempty_blob(rng, w, h)).map;
                y = skeletonize(testing::nonempty_blob(rng, w, h)).map;
                break;
        }
        const LossValue spatial = spatial_chamfer(x, y);
        const LossValue oracle = chamfer_pointset_linf(active_points(x), active_points(y));
        CHECK(spatial.raw == oracle.raw);  // exact integer equality
        CHECK(spatial.raw == spatial_chamfer(y, x).raw);
        CHECK((spatial.raw == 0.0) == (x == y));
    }
}

TEST_CASE("spatial chamfer grows monotonically under separation") {
    BinaryMask x(64, 8);
    x.set(2, 4, 1);
    double prev = 0.0;
    for (int d = 1; d < 40; ++d) {
        BinaryMask y(64, 8);
        y.set(2 + d, 4, 1);
        const double cur = spatial_chamfer(x, y).raw;
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("pixel L2 on binary masks counts disagreeing pixels") {
    BinaryMask a(2, 2, 1), b(2, 2);
    CHECK(pixel_l2(a, a).raw == doctest::Approx(0.0));
    CHECK(pixel_l2(a, b).raw == doctest::Approx(4.0));

    BinaryMask c(4, 4), d(4, 4);
    c.set(0, 0, 1);
    d.set(3, 3, 1);
    CHECK(pixel_l2(c, d).raw == doctest::Approx(2.0));

    CHECK_THROWS_AS(pixel_l2(a, BinaryMask(3, 2)), Error);
}

TEST_CASE("pixel L2 equals symmetric-difference cardinality on random masks") {
    Rng rng(223);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask a = testing::noise_mask(rng, 15, 11, 0.5);
        const BinaryMask b = testing::noise_mask(rng, 15, 11, 0.5);
        std::int64_t diff = 0;
        for (std::size_t i = 0; i < a.values.size(); ++i) diff += a.values[i] != b.values[i];
        CHECK(pixel_l2(a, b).raw == doctest::Approx(static_cast<double>(diff)));
    }
}

TEST_CASE("keypoint L2") {
    const std::vector<Vec2> a = {{0, 0}, {1, 1}};
    CHECK(keypoint_l2(a, a).raw == doctest::Approx(0.0));
    CHECK(keypoint_l2({{0, 0}}, {{3, 4}}).raw == doctest::Approx(25.0));
    CHECK(keypoint_l2({{0, 0}, {0, 0}}, {{1, 0}, {0, 2}}).raw == doctest::Approx(5.0));
    CHECK_THROWS_AS(keypoint_l2(a, {{0, 0}}), Error);
}

TEST_CASE("normalized values divide by summed active counts") {
    BinaryMask x(8, 8), y(8, 8);
    x.set(1, 1, 1);
    x.set(2, 1, 1);
    y.set(1, 1, 1);
    const LossValue v = spatial_chamfer(x, y);
    CHECK(v.normalized == doctest::Approx(v.raw / 3.0));
    CHECK(LossValue{}.raw == 0.0);
}
