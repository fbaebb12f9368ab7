#pragma once

#include <functional>
#include <vector>

#include "silt/body.hpp"
#include "silt/losses.hpp"
#include "silt/topology.hpp"

namespace silt {

/// Per-parameter-group central-difference step sizes. Sized so one step
/// moves silhouette boundaries by at least a pixel; the losses are
/// piecewise constant under sub-pixel motion.
struct FdSteps {
    double angles = 0.05;       // phi components and camera alpha
    double translation = 1.0;   // pixels
    double scale = 0.02;
    double beta = 0.02;

    double for_index(int i) const;
};

struct FitWeights {
    double w_topo = 1.0;
    double w_sil = 1.0;
    double w_beta = 0.1;
};

struct FitConfig {
    int max_iters = 10;
    FitWeights weights;
    FdSteps fd_steps;
    double initial_rate = 1.0;
    int max_halvings = 8;
    bool use_normalized_losses = true;
};

/// Loss terms at one parameter point. `total` is the weighted sum the
/// optimizer sees; the data terms are replaced by PENALTY_EMPTY when the
/// rasterized prediction has no active pixel.
struct FitLoss {
    double total = 0.0;
    double topo = 0.0;
    double sil = 0.0;
    double reg = 0.0;
    bool empty_prediction = false;
};

struct FitTraceRow {
    double total, topo, sil, reg;
};

struct FitResult {
    BodyParams params;
    std::vector<FitTraceRow> trace;  // entry 0 is the initial loss
    int iterations = 0;
    bool converged = false;
};

/// Escape value used instead of an empty-mask error when the optimizer
/// wanders off-canvas: (W*H) * max(W,H), larger than any attainable
/// spatial Chamfer value.
double empty_prediction_penalty(int canvas_w, int canvas_h);

/// Target-side quantities that never change during a fit: the silhouette,
/// its skeleton, and both cached outwards fields.
struct FitTarget {
    BinaryMask sil;
    Skeleton skel;
    DistanceMap out_sil;   // outwards(sil)
    DistanceMap out_skel;  // outwards(skel.map)

    static FitTarget from_mask(const BinaryMask& target_sil);
};

/// w_T * L_T(target skel, skel(render)) + w_S * L_S(target sil, render)
/// + w_beta * |beta - 1|^2, each term also reported separately.
FitLoss total_fit_loss(const BodyParams& params, const FitTarget& target,
                       const FitWeights& weights, bool use_normalized, int canvas_w,
                       int canvas_h);

/// Central differences over the flat 17-vector. Coordinates pinned by the
/// parameter box are probed at clamped displacements with the divisor
/// adjusted to the displacement actually applied.
std::array<double, kNumParams> fd_gradient(
    const std::function<double(const BodyParams&)>& loss_at, const BodyParams& params,
    const FdSteps& steps);

/// Parameter box used by fit and fd_gradient: phi in [-1,1], beta in
/// [0.5,2], alpha in [-pi,pi], s in [0.05,20], t unbounded.
std::array<double, kNumParams> param_lower_bounds();
std::array<double, kNumParams> param_upper_bounds();

/// Iterative silhouette fitting: steepest descent on total_fit_loss with
/// backtracking halving, accepting only strictly improving steps. The
/// trace of accepted totals is therefore non-increasing.
FitResult fit(const BinaryMask& target_sil, const BodyParams& init, const FitConfig& cfg);

/// Same optimizer loop over a caller-supplied objective (used by the
/// ablation variants, which swap the data terms).
using FitObjective = std::function<FitLoss(const BodyParams&)>;
FitResult fit_with_objective(const BodyParams& init, const FitConfig& cfg,
                             const FitObjective& objective);

}  // namespace silt
