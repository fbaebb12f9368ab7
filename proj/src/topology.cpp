#include "silt/topology.hpp"

#include <algorithm>

namespace silt {

Skeleton d2t(const DistanceMap& dist, const BinaryMask& mask) {
    if (dist.width != mask.width || dist.height != mask.height) {
        throw Error("d2t: distance map and mask dimensions differ");
    }
    const int w = mask.width, h = mask.height;
    Skeleton skel{BinaryMask(w, h)};
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            const int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, w - 1);
            std::int32_t win_max = 0;
            for (int yy = y0; yy <= y1; ++yy) {
                for (int xx = x0; xx <= x1; ++xx) {
                    win_max = std::max(win_max, dist.at(xx, yy));
                }
            }
            if (dist.at(x, y) == win_max) skel.map.set(x, y, 1);
        }
    }
    return skel;
}

Skeleton skeletonize(const BinaryMask& mask) {
    return d2t(s2d(mask, Outside::Zero), mask);
}

}  // namespace silt
