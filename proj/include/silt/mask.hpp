#pragma once

#include <cstdint>
#include <vector>

#include "silt/common.hpp"

namespace silt {

struct PixelPoint {
    int x = 0;  // column
    int y = 0;  // row

    bool operator==(const PixelPoint&) const = default;
};

/// Row-major binary grid. Every stored value is exactly 0 or 1.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;  // size width*height, entries in {0,1}

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { values[static_cast<std::size_t>(y) * width + x] = v; }
    std::size_t size() const { return values.size(); }

    /// Number of active (value 1) pixels.
    std::int64_t popcount() const;
    bool empty_mask() const { return popcount() == 0; }

    bool operator==(const BinaryMask&) const = default;
};

/// Row-major grayscale grid with intensities in [0,1].
struct GrayMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    GrayMap() = default;
    GrayMap(int w, int h, double fill = 0.0);

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, double v) { values[static_cast<std::size_t>(y) * width + x] = v; }
    std::size_t size() const { return values.size(); }

    bool operator==(const GrayMap&) const = default;
};

/// Threshold must lie strictly inside (0,1). The comparison is inclusive:
/// output is 1 wherever map(u) >= threshold.
BinaryMask binarize(const GrayMap& map, double threshold);

/// Pixel-wise complement; an involution.
BinaryMask invert(const BinaryMask& mask);

/// All active pixels in row-major order (y outer, x inner).
std::vector<PixelPoint> active_points(const BinaryMask& mask);

}  // namespace silt
