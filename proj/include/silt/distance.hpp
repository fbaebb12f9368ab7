#pragma once

#include <cstdint>

#include "silt/mask.hpp"

namespace silt {

/// Value assumed for all pixels beyond the image border during erosion.
/// Inwards maps use Zero (the world outside the frame is background);
/// outwards maps use One so distances never reflect the frame itself.
enum class Outside : std::uint8_t { Zero = 0, One = 1 };

/// Row-major grid of non-negative integer L-infinity pixel distances.
/// Zero exactly on pixels outside the map's reference set.
struct DistanceMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> values;

    DistanceMap() = default;
    DistanceMap(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0) {}

    std::int32_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::int32_t max_value() const;

    bool operator==(const DistanceMap&) const = default;
};

/// One thinning step: a pixel survives iff it is active and its full 3x3
/// closed window is active, pixels past the border counting as `outside`.
/// Output is always a subset of the input.
BinaryMask erode_once(const BinaryMask& mask, Outside outside);

/// Allocation-free erode_once into a preallocated destination of matching
/// dimensions. src and dst must not alias.
void erode_into(const BinaryMask& src, Outside outside, BinaryMask& dst);

/// The literal thinning rule with the threshold one lower (a pixel survives
/// when at most one cell of its 3x3 window is inactive), output clamped to
/// {0,1}. Fills one-pixel holes; exposed for side-by-side comparison via
/// the CLI `--erosion paper-literal` flag. Not used by s2d.
BinaryMask erode_once_paper_literal(const BinaryMask& mask, Outside outside);

/// Distance map by recursive erosion: the sum of all thinned maps from the
/// input down to the empty fixpoint. Equals the exact L-infinity distance
/// transform (s2d_oracle) pixel for pixel.
///
/// With Outside::One the mask must contain at least one background pixel,
/// otherwise erosion never terminates; that input is rejected up front.
DistanceMap s2d(const BinaryMask& mask, Outside outside);

/// Brute-force reference for s2d, straight from the definition: for each
/// active pixel, the minimum L-infinity distance over all background
/// pixels (the border exterior counts as background when outside is Zero).
/// Pure double loop over pixels; no erosion. Kept as the independent
/// oracle for equivalence tests.
DistanceMap s2d_oracle(const BinaryMask& mask, Outside outside);

/// Outwards distance map: s2d of the complement under Outside::One.
/// Value at u is the L-infinity distance to the nearest active pixel of
/// `target`; zero on target pixels. The target must be nonempty.
DistanceMap outwards(const BinaryMask& target);

/// Rescales a distance map to [0,1] intensities (max value maps to 1).
GrayMap to_gray(const DistanceMap& dist);

}  // namespace silt
