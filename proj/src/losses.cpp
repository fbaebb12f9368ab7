#include "silt/losses.hpp"

#include <algorithm>
#include <cstdlib>

namespace silt {

namespace {

void check_nonempty_sets(std::size_t na, std::size_t nb) {
    if (na == 0 || nb == 0) throw Error("chamfer: point sets must be nonempty");
}

LossValue make_loss(double raw, std::size_t na, std::size_t nb) {
    return {raw, raw / static_cast<double>(na + nb)};
}

}  // namespace

LossValue chamfer_pointset(const std::vector<PixelPoint>& a, const std::vector<PixelPoint>& b) {
    check_nonempty_sets(a.size(), b.size());
    auto one_way = [](const std::vector<PixelPoint>& from, const std::vector<PixelPoint>& to) {
        std::int64_t total = 0;
        for (const auto& p : from) {
            std::int64_t best = INT64_MAX;
            for (const auto& q : to) {
                const std::int64_t dx = p.x - q.x, dy = p.y - q.y;
                best = std::min(best, dx * dx + dy * dy);
            }
            total += best;
        }
        return total;
    };
    return make_loss(static_cast<double>(one_way(a, b) + one_way(b, a)), a.size(), b.size());
}

LossValue chamfer_pointset_linf(const std::vector<PixelPoint>& a, const std::vector<PixelPoint>& b) {
    check_nonempty_sets(a.size(), b.size());
    auto one_way = [](const std::vector<PixelPoint>& from, const std::vector<PixelPoint>& to) {
        std::int64_t total = 0;
        for (const auto& p : from) {
            int best = INT32_MAX;
            for (const auto& q : to) {
                const int d = std::max(std::abs(p.x - q.x), std::abs(p.y - q.y));
                if (d < best) best = d;
            }
            total += best;
        }
        return total;
    };
    return make_loss(static_cast<double>(one_way(a, b) + one_way(b, a)), a.size(), b.size());
}

namespace detail {

std::int64_t outwards_sum_at(const BinaryMask& target, const BinaryMask& samples) {
    // outwards(target) = sum of the erosion series of the complement, so
    // sum_u outwards(target)(u)*samples(u) = sum_i |E_i AND samples| where
    // E_0 is the complement and E_{i+1} its erosion under Outside::One.
    // The series shrinks monotonically; once the intersection is empty it
    // stays empty and the remaining terms vanish.
    BinaryMask cur = invert(target);
    BinaryMask next(target.width, target.height);
    std::int64_t total = 0;
    for (;;) {
        std::int64_t hits = 0;
        for (std::size_t i = 0; i < cur.values.size(); ++i) {
            hits += cur.values[i] & samples.values[i];
        }
        if (hits == 0) return total;
        total += hits;
        erode_into(cur, Outside::One, next);
        std::swap(cur, next);
    }
}

}  // namespace detail

LossValue spatial_chamfer(const BinaryMask& x, const BinaryMask& y) {
    if (x.width != y.width || x.height != y.height) {
        throw Error("spatial_chamfer: mask dimensions differ");
    }
    const std::int64_t nx = x.popcount(), ny = y.popcount();
    if (nx == 0 || ny == 0) {
        throw Error("spatial_chamfer: masks must be nonempty; the outwards field of an empty mask is undefined");
    }
    const std::int64_t raw = detail::outwards_sum_at(y, x) + detail::outwards_sum_at(x, y);
    return make_loss(static_cast<double>(raw), static_cast<std::size_t>(nx),
                     static_cast<std::size_t>(ny));
}

namespace {
template <typename Map>
void check_same_dims(const Map& x, const Map& y) {
    if (x.width != y.width || x.height != y.height) {
        throw Error("pixel_l2: dimensions differ");
    }
}
}  // namespace

LossValue pixel_l2(const BinaryMask& x, const BinaryMask& y) {
    check_same_dims(x, y);
    std::int64_t raw = 0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        raw += x.values[i] != y.values[i];
    }
    const std::size_t na = static_cast<std::size_t>(x.popcount());
    const std::size_t nb = static_cast<std::size_t>(y.popcount());
    const double denom = na + nb > 0 ? static_cast<double>(na + nb) : 1.0;
    return {static_cast<double>(raw), static_cast<double>(raw) / denom};
}

LossValue pixel_l2(const GrayMap& x, const GrayMap& y) {
    check_same_dims(x, y);
    double raw = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        const double d = x.values[i] - y.values[i];
        raw += d * d;
    }
    return {raw, raw / static_cast<double>(x.size() + y.size())};
}

LossValue keypoint_l2(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.size() != b.size()) throw Error("keypoint_l2: joint list lengths differ");
    double raw = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        raw += (a[i] - b[i]).norm2();
    }
    const double denom = a.empty() ? 1.0 : static_cast<double>(a.size() + b.size());
    return {raw, raw / denom};
}

}  // namespace silt
