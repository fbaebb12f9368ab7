#include "doctest.h"

#include "silt/topology.hpp"
#include "support.hpp"

using namespace silt;

namespace {

// Naive reference for the ridge predicate, scanned per pixel.
BinaryMask naive_ridge(const DistanceMap& dist, const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            std::int32_t win = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                    win = std::max(win, dist.at(nx, ny));
                }
            }
            out.set(x, y, dist.at(x, y) == win ? 1 : 0);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("bar skeleton is the interior of the middle row") {
    // 5x3 solid bar centered in 9x7. Middle-row interior has distance 2;
    // the bar's edge columns only reach 1, so they drop out.
    BinaryMask bar(9, 7);
    for (int y = 2; y <= 4; ++y) {
        for (int x = 2; x <= 6; ++x) bar.set(x, y, 1);
    }
    const Skeleton skel = skeletonize(bar);
    CHECK(skel.map.popcount() == 3);
    CHECK(skel.map.at(3, 3) == 1);
    CHECK(skel.map.at(4, 3) == 1);
    CHECK(skel.map.at(5, 3) == 1);
}

TEST_CASE("single pixel and thin lines are their own skeletons") {
    BinaryMask single(5, 5);
    single.set(2, 2, 1);
    CHECK(skeletonize(single).map == single);

    BinaryMask strip(7, 1, 1);
    CHECK(skeletonize(strip).map == strip);

    BinaryMask diag(7, 7);
    for (int i = 0; i < 7; ++i) diag.set(i, i, 1);
    CHECK(skeletonize(diag).map == diag);
}

TEST_CASE("5x5 square in a 9x9 field reduces to its center") {
    BinaryMask m(9, 9);
    for (int y = 2; y <= 6; ++y) {
        for (int x = 2; x <= 6; ++x) m.set(x, y, 1);
    }
    const Skeleton skel = skeletonize(m);
    CHECK(skel.map.popcount() == 1);
    CHECK(skel.map.at(4, 4) == 1);
}

TEST_CASE("far-apart components skeletonize independently") {
    BinaryMask a(40, 20), b(40, 20), both(40, 20);
    for (int y = 3; y < 8; ++y) {
        for (int x = 3; x < 8; ++x) {
            a.set(x, y, 1);
            both.set(x, y, 1);
        }
    }
    for (int y = 10; y < 17; ++y) {
        for (int x = 25; x < 36; ++x) {
            b.set(x, y, 1);
            both.set(x, y, 1);
        }
    }
    BinaryMask expected(40, 20);
    for (std::size_t i = 0; i < expected.values.size(); ++i) {
        expected.values[i] = skeletonize(a).map.values[i] | skeletonize(b).map.values[i];
    }
    CHECK(skeletonize(both).map == expected);
}

TEST_CASE("empty mask gives an empty skeleton") {
    CHECK(skeletonize(BinaryMask(6, 4)).map.popcount() == 0);
}

TEST_CASE("d2t rejects mismatched dimensions") {
    CHECK_THROWS_AS(d2t(DistanceMap(3, 3), BinaryMask(4, 3)), Error);
}

TEST_CASE("skeleton invariants on random masks") {
    Rng rng(113);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = 5 + static_cast<int>(rng.below(28));
        const int h = 5 + static_cast<int>(rng.below(20));
        const BinaryMask m = trial % 2 == 0 ? testing::noise_mask(rng, w, h, rng.uniform(0.2, 0.8))
                                            : testing::blob_mask(rng, w, h);
        const DistanceMap dist = s2d(m, Outside::Zero);
        const Skeleton skel = d2t(dist, m);

        // T subset of S, and nonempty exactly when S is.
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            CHECK(skel.map.values[i] <= m.values[i]);
        }
        CHECK((skel.map.popcount() > 0) == (m.popcount() > 0));

        // Every skeleton pixel sits on positive distance.
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (skel.map.at(x, y)) CHECK(dist.at(x, y) >= 1);
            }
        }

        // Exact agreement with the naive window scan.
        CHECK(skel.map == naive_ridge(dist, m));
    }
}

TEST_CASE("skeleton of a thin skeleton is itself") {
    Rng rng(131);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask m = testing::nonempty_blob(rng, 24, 24);
        const BinaryMask t = skeletonize(m).map;
        // Only guaranteed for one-pixel-wide sets with no 2x2 block.
        bool has_block = false;
        for (int y = 0; y + 1 < 24 && !has_block; ++y) {
            for (int x = 0; x + 1 < 24; ++x) {
                if (t.at(x, y) && t.at(x + 1, y) && t.at(x, y + 1) && t.at(x + 1, y + 1)) {
                    has_block = true;
                    break;
                }
            }
        }
        if (!has_block && t.popcount() > 0) {
            CHECK(skeletonize(t).map == t);
        }
    }
}
