#pragma once

// Shared random-input generators for property tests. Everything is driven
// by silt::Rng so failures reproduce from the printed seed.

#include "silt/mask.hpp"
#include "silt/rng.hpp"

namespace silt::testing {

/// Bernoulli noise mask: each pixel active with probability p.
inline BinaryMask noise_mask(Rng& rng, int w, int h, double p) {
    BinaryMask m(w, h);
    for (auto& v : m.values) v = rng.next_double() < p ? 1 : 0;
    return m;
}

/// Union of axis-aligned rectangles and discs; produces masks with real
/// interior structure (distances > 1).
inline BinaryMask blob_mask(Rng& rng, int w, int h, int pieces = 3) {
    BinaryMask m(w, h);
    for (int k = 0; k < pieces; ++k) {
        if (rng.next_double() < 0.5) {
            const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(w)));
            const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(h)));
            const int rw = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(w / 2 + 1)));
            const int rh = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(h / 2 + 1)));
            for (int y = y0; y < std::min(h, y0 + rh); ++y) {
                for (int x = x0; x < std::min(w, x0 + rw); ++x) m.set(x, y, 1);
            }
        } else {
            const double cx = rng.uniform(0, w);
            const double cy = rng.uniform(0, h);
            const double r = rng.uniform(1.0, std::min(w, h) / 3.0);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const double dx = x - cx, dy = y - cy;
                    if (dx * dx + dy * dy <= r * r) m.set(x, y, 1);
                }
            }
        }
    }
    return m;
}

/// A blob mask guaranteed nonempty.
inline BinaryMask nonempty_blob(Rng& rng, int w, int h, int pieces = 3) {
    for (;;) {
        BinaryMask m = blob_mask(rng, w, h, pieces);
        if (m.popcount() > 0) return m;
    }
}

inline BinaryMask nonempty_noise(Rng& rng, int w, int h, double p) {
    for (;;) {
        BinaryMask m = noise_mask(rng, w, h, p);
        if (m.popcount() > 0) return m;
    }
}

}  // namespace silt::testing
