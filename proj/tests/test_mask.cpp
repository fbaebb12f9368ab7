#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "silt/pgm.hpp"
#include "support.hpp"

using namespace silt;

namespace {
std::filesystem::path tmp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("binarize follows the inclusive threshold rule") {
    GrayMap g(2, 1);
    g.set(0, 0, 0.2);
    g.set(1, 0, 0.8);
    const BinaryMask m = binarize(g, 0.5);
    CHECK(m.at(0, 0) == 0);
    CHECK(m.at(1, 0) == 1);

    const GrayMap zeros(4, 3, 0.0);
    CHECK(binarize(zeros, 0.5).popcount() == 0);

    const GrayMap at_threshold(4, 3, 0.5);
    CHECK(binarize(at_threshold, 0.5).popcount() == 12);  // >= is inclusive

    CHECK_THROWS_AS(binarize(zeros, 0.0), Error);
    CHECK_THROWS_AS(binarize(zeros, 1.0), Error);
}

TEST_CASE("binarize is idempotent on binary-valued maps") {
    Rng rng(11);
    const BinaryMask m = testing::noise_mask(rng, 9, 7, 0.4);
    GrayMap as_gray(9, 7);
    for (std::size_t i = 0; i < m.values.size(); ++i) as_gray.values[i] = m.values[i];
    CHECK(binarize(as_gray, 0.5) == m);
}

TEST_CASE("invert is an involution and flips each pixel") {
    BinaryMask m(2, 1);
    m.set(1, 0, 1);
    const BinaryMask inv = invert(m);
    CHECK(inv.at(0, 0) == 1);
    CHECK(inv.at(1, 0) == 0);

    const BinaryMask ones(3, 3, 1);
    CHECK(invert(ones).popcount() == 0);

    Rng rng(5);
    const BinaryMask random = testing::noise_mask(rng, 13, 8, 0.5);
    CHECK(invert(invert(random)) == random);
}

TEST_CASE("active_points enumerates in row-major order") {
    BinaryMask m(2, 2);
    m.set(1, 0, 1);
    m.set(0, 1, 1);
    const auto pts = active_points(m);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0] == PixelPoint{1, 0});
    CHECK(pts[1] == PixelPoint{0, 1});

    CHECK(active_points(BinaryMask(4, 4)).empty());
    CHECK(active_points(BinaryMask(2, 2, 1)).size() == 4);
}

TEST_CASE("active point counts of a mask and its complement partition the grid") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = testing::noise_mask(rng, 11, 6, rng.next_double());
        CHECK(active_points(m).size() + active_points(invert(m)).size() == 66);
    }
}

TEST_CASE("pgm round-trip preserves masks bit-exactly") {
    Rng rng(23);
    const auto path = tmp_file("silt_mask_roundtrip.pgm");
    for (int trial = 0; trial < 5; ++trial) {
        const BinaryMask m = testing::noise_mask(rng, 16, 16, 0.5);
        save_pgm(m, path.string());
        CHECK(load_mask(path.string()) == m);
    }
    std::filesystem::remove(path);
}

TEST_CASE("pgm reader decodes P5 and P2 payloads") {
    const auto p5 = tmp_file("silt_p5.pgm");
    {
        std::ofstream out(p5, std::ios::binary);
        out << "P5\n2 2\n255\n";
        const unsigned char bytes[4] = {0, 255, 255, 0};
        out.write(reinterpret_cast<const char*>(bytes), 4);
    }
    const GrayMap g = load_pgm(p5.string());
    CHECK(g.width == 2);
    CHECK(g.at(0, 0) == doctest::Approx(0.0));
    CHECK(g.at(1, 0) == doctest::Approx(1.0));
    CHECK(g.at(0, 1) == doctest::Approx(1.0));
    CHECK(g.at(1, 1) == doctest::Approx(0.0));

    const auto p2 = tmp_file("silt_p2.pgm");
    {
        std::ofstream out(p2);
        out << "P2 1 1 255 128";
    }
    const GrayMap g2 = load_pgm(p2.string());
    CHECK(g2.at(0, 0) == doctest::Approx(128.0 / 255.0));

    std::filesystem::remove(p5);
    std::filesystem::remove(p2);
}

TEST_CASE("pgm reader rejects malformed input with an offset") {
    const auto bad = tmp_file("silt_bad.pgm");
    {
        std::ofstream out(bad, std::ios::binary);
        out << "P7\n2 2\n255\n....";
    }
    CHECK_THROWS_WITH_AS(load_pgm(bad.string()), doctest::Contains("unsupported magic"), Error);

    {
        std::ofstream out(bad, std::ios::binary);
        out << "P5\n4 4\n255\nxy";  // payload should be 16 bytes
    }
    CHECK_THROWS_WITH_AS(load_pgm(bad.string()), doctest::Contains("truncated"), Error);
    std::filesystem::remove(bad);

    CHECK_THROWS_AS(load_pgm("/nonexistent/nowhere.pgm"), Error);
}

TEST_CASE("pgm writer reports unwritable paths") {
    CHECK_THROWS_AS(save_pgm(BinaryMask(2, 2, 1), "/nonexistent-dir/mask.pgm"), Error);
}

TEST_CASE("16-bit P5 samples are scaled by maxval") {
    const auto p5 = tmp_file("silt_p5_16.pgm");
    {
        std::ofstream out(p5, std::ios::binary);
        out << "P5\n2 1\n65535\n";
        const unsigned char bytes[4] = {0xff, 0xff, 0x00, 0x00};  // big-endian
        out.write(reinterpret_cast<const char*>(bytes), 4);
    }
    const GrayMap g = load_pgm(p5.string());
    CHECK(g.at(0, 0) == doctest::Approx(1.0));
    CHECK(g.at(1, 0) == doctest::Approx(0.0));
    std::filesystem::remove(p5);
}
