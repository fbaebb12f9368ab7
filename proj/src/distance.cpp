#include "silt/distance.hpp"

#include <algorithm>
#include <cstring>

namespace silt {

std::int32_t DistanceMap::max_value() const {
    return values.empty() ? 0 : *std::max_element(values.begin(), values.end());
}

namespace {

// Vertical closed AND of rows y-1..y+1 into `row`, then the caller takes
// the horizontal AND. Separating the two passes keeps the inner loops
// straight-line and lets the compiler vectorize them.
void vertical_and(const BinaryMask& m, int y, std::uint8_t border, std::uint8_t* row) {
    const int w = m.width;
    const std::uint8_t* mid = m.values.data() + static_cast<std::size_t>(y) * w;
    const std::uint8_t* up = y > 0 ? mid - w : nullptr;
    const std::uint8_t* dn = y + 1 < m.height ? mid + w : nullptr;
    if (up && dn) {
        for (int x = 0; x < w; ++x) row[x] = up[x] & mid[x] & dn[x];
    } else if (up) {
        for (int x = 0; x < w; ++x) row[x] = up[x] & mid[x] & border;
    } else if (dn) {
        for (int x = 0; x < w; ++x) row[x] = border & mid[x] & dn[x];
    } else {
        for (int x = 0; x < w; ++x) row[x] = border & mid[x];
    }
}

}  // namespace

void erode_into(const BinaryMask& src, Outside outside, BinaryMask& dst) {
    const int w = src.width;
    const std::uint8_t border = outside == Outside::One ? 1 : 0;
    std::vector<std::uint8_t> scratch(static_cast<std::size_t>(w));
    std::uint8_t* v = scratch.data();
    for (int y = 0; y < src.height; ++y) {
        vertical_and(src, y, border, v);
        std::uint8_t* out = dst.values.data() + static_cast<std::size_t>(y) * w;
        std::uint8_t left = border;
        for (int x = 0; x + 1 < w; ++x) {
            const std::uint8_t cur = v[x];
            out[x] = left & cur & v[x + 1];
            left = cur;
        }
        out[w - 1] = left & v[w - 1] & border;
    }
}

BinaryMask erode_once(const BinaryMask& mask, Outside outside) {
    BinaryMask out(mask.width, mask.height);
    erode_into(mask, outside, out);
    return out;
}

BinaryMask erode_once_paper_literal(const BinaryMask& mask, Outside outside) {
    const int w = mask.width, h = mask.height;
    const int border = outside == Outside::One ? 1 : 0;
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int sum = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    sum += (nx >= 0 && nx < w && ny >= 0 && ny < h) ? mask.at(nx, ny) : border;
                }
            }
            // ReLU(sum - (n^2 - 2)) clamped to {0,1}: survives when at most
            // one window cell is missing. Note the center is not required.
            out.set(x, y, sum >= 8 ? 1 : 0);
        }
    }
    return out;
}

namespace {

void check_terminates(const BinaryMask& mask, Outside outside) {
    if (outside == Outside::One && mask.popcount() == static_cast<std::int64_t>(mask.size())) {
        throw Error("s2d: all-ones mask with outside value 1 never reaches the erosion fixpoint");
    }
}

}  // namespace

DistanceMap s2d(const BinaryMask& mask, Outside outside) {
    check_terminates(mask, outside);
    DistanceMap dist(mask.width, mask.height);
    BinaryMask cur = mask;
    BinaryMask next(mask.width, mask.height);
    bool any = cur.popcount() > 0;
    while (any) {
        any = false;
        for (std::size_t i = 0; i < cur.values.size(); ++i) dist.values[i] += cur.values[i];
        erode_into(cur, outside, next);
        std::swap(cur, next);
        for (std::uint8_t b : cur.values) {
            if (b) {
                any = true;
                break;
            }
        }
    }
    return dist;
}

DistanceMap s2d_oracle(const BinaryMask& mask, Outside outside) {
    check_terminates(mask, outside);
    const int w = mask.width, h = mask.height;
    DistanceMap dist(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            // Distance to the border exterior, if the exterior is background.
            int best = outside == Outside::Zero
                           ? std::min(std::min(x, y), std::min(w - 1 - x, h - 1 - y)) + 1
                           : w + h;
            for (int yy = 0; yy < h && best > 1; ++yy) {
                const int dy = std::abs(yy - y);
                if (dy >= best) continue;  // every pixel of this row is at least `best` away
                for (int xx = 0; xx < w; ++xx) {
                    if (mask.at(xx, yy)) continue;
                    const int d = std::max(std::abs(xx - x), dy);
                    if (d < best) best = d;
                }
            }
            dist.values[static_cast<std::size_t>(y) * w + x] = best;
        }
    }
    return dist;
}

DistanceMap outwards(const BinaryMask& target) {
    if (target.popcount() == 0) {
        throw Error("outwards: target mask is empty; the distance field is undefined");
    }
    return s2d(invert(target), Outside::One);
}

GrayMap to_gray(const DistanceMap& dist) {
    GrayMap g(dist.width, dist.height);
    const std::int32_t m = dist.max_value();
    if (m > 0) {
        for (std::size_t i = 0; i < dist.values.size(); ++i) {
            g.values[i] = static_cast<double>(dist.values[i]) / static_cast<double>(m);
        }
    }
    return g;
}

}  // namespace silt
