#include "silt/mask.hpp"

#include <numeric>

namespace silt {

namespace {
void check_dims(int w, int h) {
    if (w < 1 || h < 1) {
        throw Error("mask dimensions must be at least 1x1, got " + std::to_string(w) + "x" +
                    std::to_string(h));
    }
}
}  // namespace

BinaryMask::BinaryMask(int w, int h, std::uint8_t fill) : width(w), height(h) {
    check_dims(w, h);
    values.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::int64_t BinaryMask::popcount() const {
    return std::accumulate(values.begin(), values.end(), std::int64_t{0});
}

GrayMap::GrayMap(int w, int h, double fill) : width(w), height(h) {
    check_dims(w, h);
    values.assign(static_cast<std::size_t>(w) * h, fill);
}

BinaryMask binarize(const GrayMap& map, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw Error("binarize threshold must lie in (0,1), got " + std::to_string(threshold));
    }
    BinaryMask out(map.width, map.height);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        out.values[i] = map.values[i] >= threshold ? 1 : 0;
    }
    return out;
}

BinaryMask invert(const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        out.values[i] = mask.values[i] ? 0 : 1;
    }
    return out;
}

std::vector<PixelPoint> active_points(const BinaryMask& mask) {
    std::vector<PixelPoint> pts;
    pts.reserve(static_cast<std::size_t>(mask.popcount()));
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.at(x, y)) pts.push_back({x, y});
        }
    }
    return pts;
}

}  // namespace silt
