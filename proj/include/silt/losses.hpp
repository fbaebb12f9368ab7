#pragma once

#include <vector>

#include "silt/common.hpp"
#include "silt/distance.hpp"
#include "silt/mask.hpp"

namespace silt {

/// raw is an exact integer for spatial_chamfer and for pixel losses on
/// binary inputs; normalized divides raw by the summed active-pixel (or
/// point) counts of the two operands.
struct LossValue {
    double raw = 0.0;
    double normalized = 0.0;
};

/// Two-way point-set Chamfer with squared Euclidean distances:
/// sum over A of the squared distance to the nearest point of B, plus the
/// symmetric term. Both sets must be nonempty.
LossValue chamfer_pointset(const std::vector<PixelPoint>& a, const std::vector<PixelPoint>& b);

/// Two-way point-set Chamfer with unsquared L-infinity distances; the
/// exact point-set form of spatial_chamfer.
LossValue chamfer_pointset_linf(const std::vector<PixelPoint>& a, const std::vector<PixelPoint>& b);

/// Spatial topology-alignment loss: the outwards distance field of each
/// mask sampled at the other mask's active pixels, summed both ways.
/// Symmetric, an exact non-negative integer, and equal to
/// chamfer_pointset_linf on the two active-point sets. Masks must be
/// nonempty and share dimensions.
LossValue spatial_chamfer(const BinaryMask& x, const BinaryMask& y);

/// Sum of squared per-pixel differences. On binary inputs this counts the
/// disagreeing pixels (symmetric difference cardinality).
LossValue pixel_l2(const BinaryMask& x, const BinaryMask& y);
LossValue pixel_l2(const GrayMap& x, const GrayMap& y);

/// Sum of squared distances between corresponding joints; lists must have
/// equal length and ordering.
LossValue keypoint_l2(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

namespace detail {
/// One side of spatial_chamfer: sum over active pixels of `samples` of the
/// outwards distance to `target`. Computed by the erosion-sum identity,
/// truncated once no sampled pixel remains active (later terms are zero,
/// so the truncation is exact). Exposed for reuse by the fitting loop,
/// which caches the full outwards map on one side only.
std::int64_t outwards_sum_at(const BinaryMask& target, const BinaryMask& samples);
}  // namespace detail

}  // namespace silt
