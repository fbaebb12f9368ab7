#pragma once

#include "silt/distance.hpp"

namespace silt {

/// Ridge line of a silhouette's inwards distance map. The map is always a
/// subset of the source mask and is nonempty exactly when the source is.
struct Skeleton {
    BinaryMask map;

    int width() const { return map.width; }
    int height() const { return map.height; }

    bool operator==(const Skeleton&) const = default;
};

/// Ridge extraction: a pixel belongs to the skeleton iff it is active in
/// `mask` and its distance value equals the maximum of `dist` over the 3x3
/// closed window around it. Windows are clipped at image borders. `dist`
/// must be the inwards map of `mask` (s2d with Outside::Zero).
///
/// Distance values are integers, so the +1-then-ReLU construction reduces
/// to the exact predicate dist(u) == windowmax(u); no float comparisons.
Skeleton d2t(const DistanceMap& dist, const BinaryMask& mask);

/// Mask -> skeleton composition: d2t(s2d(mask, Outside::Zero), mask).
Skeleton skeletonize(const BinaryMask& mask);

}  // namespace silt
