#include "silt/fitting.hpp"

#include <algorithm>
#include <cmath>

namespace silt {

double FdSteps::for_index(int i) const {
    if (i < kNumSegments) return angles;  // phi
    if (i < 13) return beta;
    if (i == 13) return angles;  // alpha
    if (i == 14) return scale;
    return translation;  // t.x, t.y
}

double empty_prediction_penalty(int canvas_w, int canvas_h) {
    return static_cast<double>(canvas_w) * canvas_h * std::max(canvas_w, canvas_h);
}

FitTarget FitTarget::from_mask(const BinaryMask& target_sil) {
    if (target_sil.popcount() == 0) throw Error("fit: target silhouette is empty");
    FitTarget t;
    t.sil = target_sil;
    t.skel = skeletonize(target_sil);
    t.out_sil = outwards(target_sil);
    t.out_skel = outwards(t.skel.map);
    return t;
}

namespace {

// One side of the spatial Chamfer against a cached outwards field; the
// other side runs the truncated erosion sum against the prediction.
double chamfer_with_cache(const DistanceMap& out_target, const BinaryMask& target,
                          const BinaryMask& pred, bool normalized, std::int64_t target_count) {
    std::int64_t raw = 0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        if (pred.values[i]) raw += out_target.values[i];
    }
    raw += detail::outwards_sum_at(pred, target);
    if (!normalized) return static_cast<double>(raw);
    const std::int64_t denom = target_count + pred.popcount();
    return static_cast<double>(raw) / static_cast<double>(denom);
}

}  // namespace

FitLoss total_fit_loss(const BodyParams& params, const FitTarget& target,
                       const FitWeights& weights, bool use_normalized, int canvas_w,
                       int canvas_h) {
    FitLoss loss;
    const double db0 = params.beta[0] - 1.0, db1 = params.beta[1] - 1.0,
                 db2 = params.beta[2] - 1.0;
    loss.reg = db0 * db0 + db1 * db1 + db2 * db2;

    const BinaryMask pred = rasterize(params, canvas_w, canvas_h);
    if (pred.popcount() == 0) {
        loss.empty_prediction = true;
        loss.topo = loss.sil = empty_prediction_penalty(canvas_w, canvas_h);
    } else {
        const Skeleton pred_skel = skeletonize(pred);
        loss.sil = chamfer_with_cache(target.out_sil, target.sil, pred, use_normalized,
                                      target.sil.popcount());
        loss.topo = chamfer_with_cache(target.out_skel, target.skel.map, pred_skel.map,
                                       use_normalized, target.skel.map.popcount());
    }
    loss.total = weights.w_topo * loss.topo + weights.w_sil * loss.sil + weights.w_beta * loss.reg;
    return loss;
}

std::array<double, kNumParams> param_lower_bounds() {
    std::array<double, kNumParams> lo{};
    for (int i = 0; i < kNumSegments; ++i) lo[i] = -1.0;
    lo[10] = lo[11] = lo[12] = 0.5;
    lo[13] = -M_PI;
    lo[14] = 0.05;
    lo[15] = lo[16] = -1e18;
    return lo;
}

std::array<double, kNumParams> param_upper_bounds() {
    std::array<double, kNumParams> hi{};
    for (int i = 0; i < kNumSegments; ++i) hi[i] = 1.0;
    hi[10] = hi[11] = hi[12] = 2.0;
    hi[13] = M_PI;
    hi[14] = 20.0;
    hi[15] = hi[16] = 1e18;
    return hi;
}

std::array<double, kNumParams> fd_gradient(
    const std::function<double(const BodyParams&)>& loss_at, const BodyParams& params,
    const FdSteps& steps) {
    const auto lo = param_lower_bounds();
    const auto hi = param_upper_bounds();
    const auto base = params.to_vector();
    std::array<double, kNumParams> grad{};
    for (int i = 0; i < kNumParams; ++i) {
        const double h = steps.for_index(i);
        const double up = clamp(base[i] + h, lo[i], hi[i]);
        const double dn = clamp(base[i] - h, lo[i], hi[i]);
        if (up == dn) {
            grad[i] = 0.0;
            continue;
        }
        auto probe = base;
        probe[i] = up;
        const double f_up = loss_at(BodyParams::from_vector(probe));
        probe[i] = dn;
        const double f_dn = loss_at(BodyParams::from_vector(probe));
        grad[i] = (f_up - f_dn) / (up - dn);
    }
    return grad;
}

FitResult fit(const BinaryMask& target_sil, const BodyParams& init, const FitConfig& cfg) {
    const FitTarget target = FitTarget::from_mask(target_sil);
    const int w = target_sil.width, h = target_sil.height;
    return fit_with_objective(init, cfg, [&](const BodyParams& p) {
        return total_fit_loss(p, target, cfg.weights, cfg.use_normalized_losses, w, h);
    });
}

FitResult fit_with_objective(const BodyParams& init, const FitConfig& cfg,
                             const FitObjective& eval) {
    const auto lo = param_lower_bounds();
    const auto hi = param_upper_bounds();
    auto eval_total = [&](const BodyParams& p) { return eval(p).total; };

    FitResult result;
    result.params = init;
    result.params.clamp_to_box();
    FitLoss cur = eval(result.params);
    result.trace.push_back({cur.total, cur.topo, cur.sil, cur.reg});

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const auto grad = fd_gradient(eval_total, result.params, cfg.fd_steps);

        // Scale each component by its step size, then normalize: at rate 1
        // no coordinate moves farther than its own finite-difference step.
        std::array<double, kNumParams> dir{};
        double norm2 = 0.0;
        for (int i = 0; i < kNumParams; ++i) {
            dir[i] = grad[i] * cfg.fd_steps.for_index(i);
            norm2 += dir[i] * dir[i];
        }
        if (norm2 == 0.0) {
            result.converged = true;
            break;
        }
        const double inv_norm = 1.0 / std::sqrt(norm2);
        const auto base = result.params.to_vector();

        bool accepted = false;
        double rate = cfg.initial_rate;
        for (int half = 0; half <= cfg.max_halvings; ++half, rate *= 0.5) {
            auto cand = base;
            for (int i = 0; i < kNumParams; ++i) {
                cand[i] = clamp(base[i] - rate * dir[i] * inv_norm * cfg.fd_steps.for_index(i),
                                lo[i], hi[i]);
            }
            const BodyParams cand_params = BodyParams::from_vector(cand);
            const FitLoss cand_loss = eval(cand_params);
            if (cand_loss.total < cur.total) {
                result.params = cand_params;
                cur = cand_loss;
                accepted = true;
                break;
            }
        }
        result.iterations = iter + 1;
        result.trace.push_back({cur.total, cur.topo, cur.sil, cur.reg});
        if (!accepted) {
            // No improving step at any rate: a plateau of the
            // piecewise-constant loss. Nothing further can change.
            result.converged = true;
            break;
        }
        const std::size_t n = result.trace.size();
        if (n >= 4) {
            const double before = result.trace[n - 4].total;
            const double now = result.trace[n - 1].total;
            if (before - now < 1e-4 * std::max(before, 1e-12)) {
                result.converged = true;
                break;
            }
        }
    }
    return result;
}

}  // namespace silt
