#include "doctest.h"

#include "silt/distance.hpp"
#include "support.hpp"

using namespace silt;

namespace {

BinaryMask from_rows(const std::vector<std::vector<int>>& rows) {
    BinaryMask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) m.set(x, y, rows[y][x] ? 1 : 0);
    }
    return m;
}

}  // namespace

TEST_CASE("erode_once keeps only pixels with a fully active window") {
    // 3x3 all-ones with background outside: only the center survives.
    const BinaryMask ones(3, 3, 1);
    const BinaryMask eroded = erode_once(ones, Outside::Zero);
    CHECK(eroded.popcount() == 1);
    CHECK(eroded.at(1, 1) == 1);

    BinaryMask single(5, 5);
    single.set(2, 2, 1);
    CHECK(erode_once(single, Outside::Zero).popcount() == 0);

    // With an active exterior there is no boundary to shave.
    const BinaryMask big(5, 5, 1);
    CHECK(erode_once(big, Outside::One) == big);
}

TEST_CASE("erode_once output is a subset of its input") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const BinaryMask m = testing::noise_mask(rng, 17, 9, 0.6);
        for (const Outside outside : {Outside::Zero, Outside::One}) {
            const BinaryMask e = erode_once(m, outside);
            for (std::size_t i = 0; i < m.values.size(); ++i) {
                CHECK(e.values[i] <= m.values[i]);
            }
        }
    }
}

TEST_CASE("s2d matches the hand-derived 5x5 example") {
    const BinaryMask ones(5, 5, 1);
    const DistanceMap dist = s2d(ones, Outside::Zero);
    const std::vector<std::int32_t> want = {
        1, 1, 1, 1, 1,  //
        1, 2, 2, 2, 1,  //
        1, 2, 3, 2, 1,  //
        1, 2, 2, 2, 1,  //
        1, 1, 1, 1, 1,
    };
    CHECK(dist.values == want);
    CHECK(dist == s2d_oracle(ones, Outside::Zero));
}

TEST_CASE("s2d trivial cases") {
    BinaryMask single(5, 5);
    single.set(2, 2, 1);
    const DistanceMap dist = s2d(single, Outside::Zero);
    CHECK(dist.at(2, 2) == 1);
    CHECK(dist.max_value() == 1);

    const BinaryMask empty(4, 6);
    CHECK(s2d(empty, Outside::Zero).max_value() == 0);
}

TEST_CASE("s2d rejects the non-terminating input") {
    const BinaryMask ones(4, 4, 1);
    CHECK_THROWS_AS(s2d(ones, Outside::One), Error);
    CHECK_THROWS_AS(s2d_oracle(ones, Outside::One), Error);
    CHECK_NOTHROW(s2d(ones, Outside::Zero));
}

TEST_CASE("oracle distances at borders follow the outside policy") {
    // Active pixel adjacent to the border: with background outside the
    // distance is 1; with active outside it reaches the nearest interior
    // background pixel instead.
    BinaryMask strip(6, 1, 1);
    strip.set(4, 0, 0);  // only interior background at x=4
    const DistanceMap zero_policy = s2d_oracle(strip, Outside::Zero);
    CHECK(zero_policy.at(0, 0) == 1);

    const DistanceMap one_policy = s2d_oracle(strip, Outside::One);
    CHECK(one_policy.at(0, 0) == 4);  // |0-4|
    CHECK(one_policy.at(5, 0) == 1);
    CHECK(one_policy.at(4, 0) == 0);
}

TEST_CASE("oracle equivalence on random masks, both policies") {
    Rng rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = 4 + static_cast<int>(rng.below(28));
        const int h = 4 + static_cast<int>(rng.below(20));
        const BinaryMask m = trial % 2 == 0 ? testing::noise_mask(rng, w, h, rng.uniform(0.2, 0.9))
                                            : testing::blob_mask(rng, w, h);
        CHECK(s2d(m, Outside::Zero) == s2d_oracle(m, Outside::Zero));
        if (m.popcount() < static_cast<std::int64_t>(m.size())) {
            CHECK(s2d(m, Outside::One) == s2d_oracle(m, Outside::One));
        }
    }
}

TEST_CASE("s2d is positive exactly on active pixels") {
    Rng rng(7);
    const BinaryMask m = testing::blob_mask(rng, 24, 18);
    const DistanceMap dist = s2d(m, Outside::Zero);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        CHECK((dist.values[i] >= 1) == (m.values[i] == 1));
    }
}

TEST_CASE("translation covariance away from borders") {
    Rng rng(53);
    // Small blob placed far from every border, shifted by (3,2).
    BinaryMask a(40, 40), b(40, 40);
    for (int y = 15; y < 22; ++y) {
        for (int x = 14; x < 24; ++x) {
            a.set(x, y, 1);
            b.set(x + 3, y + 2, 1);
        }
    }
    const DistanceMap da = s2d(a, Outside::Zero);
    const DistanceMap db = s2d(b, Outside::Zero);
    for (int y = 15; y < 22; ++y) {
        for (int x = 14; x < 24; ++x) {
            CHECK(da.at(x, y) == db.at(x + 3, y + 2));
        }
    }
}

TEST_CASE("outwards distances measure L-infinity range to the target") {
    BinaryMask target(4, 1);
    target.set(0, 0, 1);
    const DistanceMap d = outwards(target);
    CHECK(d.values == std::vector<std::int32_t>{0, 1, 2, 3});

    CHECK_THROWS_AS(outwards(BinaryMask(3, 3)), Error);

    const BinaryMask all(3, 3, 1);
    CHECK(outwards(all).max_value() == 0);
}

TEST_CASE("outwards is zero exactly on target pixels") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask m = testing::nonempty_blob(rng, 20, 14);
        const DistanceMap d = outwards(m);
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            CHECK((d.values[i] == 0) == (m.values[i] == 1));
        }
    }
}

TEST_CASE("erosion reaches the fixpoint within the documented pass bounds") {
    Rng rng(83);
    for (int trial = 0; trial < 10; ++trial) {
        const int w = 5 + static_cast<int>(rng.below(30));
        const int h = 5 + static_cast<int>(rng.below(30));
        const BinaryMask m = testing::noise_mask(rng, w, h, 0.7);
        // Max distance bounds the pass count directly.
        CHECK(s2d(m, Outside::Zero).max_value() <= (std::min(w, h) + 1) / 2);
        if (m.popcount() < static_cast<std::int64_t>(m.size())) {
            CHECK(s2d(m, Outside::One).max_value() <= std::max(w, h));
        }
    }
}

TEST_CASE("paper-literal erosion rule fills single-pixel holes") {
    // Documented discrepancy demo: an interior hole survives one step of
    // the literal rule but not the strict rule.
    BinaryMask holed(5, 5, 1);
    holed.set(2, 2, 0);
    const BinaryMask strict = erode_once(holed, Outside::One);
    const BinaryMask literal = erode_once_paper_literal(holed, Outside::One);
    CHECK(strict.at(2, 2) == 0);
    CHECK(literal.at(2, 2) == 1);
    // And the literal rule stays binary by construction of the clamp.
    for (const auto v : literal.values) CHECK(v <= 1);
}

TEST_CASE("to_gray rescales the max to full intensity") {
    BinaryMask ones(5, 5, 1);
    const GrayMap g = to_gray(s2d(ones, Outside::Zero));
    CHECK(g.at(2, 2) == doctest::Approx(1.0));
    CHECK(g.at(0, 0) == doctest::Approx(1.0 / 3.0));
}
