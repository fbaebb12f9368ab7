#include "silt/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "silt/parallel.hpp"
#include "silt/rng.hpp"

namespace silt {

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

RegressorWeights RegressorWeights::zeros() {
    RegressorWeights w;
    w.w1.assign(static_cast<std::size_t>(kHiddenDim) * kInputDim, 0.0);
    w.b1.assign(kHiddenDim, 0.0);
    w.w2.assign(static_cast<std::size_t>(kHiddenDim) * kHiddenDim, 0.0);
    w.b2.assign(kHiddenDim, 0.0);
    w.w3.assign(static_cast<std::size_t>(kNumParams) * kHiddenDim, 0.0);
    w.b3.assign(kNumParams, 0.0);
    return w;
}

RegressorWeights RegressorWeights::glorot(std::uint64_t seed) {
    RegressorWeights w = zeros();
    Rng rng(seed);
    auto fill = [&](std::vector<double>& v, int fan_in, int fan_out) {
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        for (auto& x : v) x = rng.uniform(-a, a);
    };
    // Draw order is part of the determinism contract: w1, w2, w3.
    fill(w.w1, kInputDim, kHiddenDim);
    fill(w.w2, kHiddenDim, kHiddenDim);
    fill(w.w3, kHiddenDim, kNumParams);
    return w;
}

void RegressorWeights::add_scaled(const RegressorWeights& g, double factor) {
    auto axpy = [factor](std::vector<double>& dst, const std::vector<double>& src) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += factor * src[i];
    };
    axpy(w1, g.w1);
    axpy(b1, g.b1);
    axpy(w2, g.w2);
    axpy(b2, g.b2);
    axpy(w3, g.w3);
    axpy(b3, g.b3);
}

std::string weights_to_json(const RegressorWeights& w) {
    nlohmann::ordered_json j;
    j["w1"] = w.w1;
    j["b1"] = w.b1;
    j["w2"] = w.w2;
    j["b2"] = w.b2;
    j["w3"] = w.w3;
    j["b3"] = w.b3;
    return j.dump();
}

RegressorWeights weights_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("weights JSON: ") + e.what());
    }
    RegressorWeights w = RegressorWeights::zeros();
    auto read = [&](const char* key, std::vector<double>& dst) {
        if (!j.contains(key)) throw Error(std::string("weights JSON: missing key '") + key + "'");
        const auto& arr = j[key];
        if (!arr.is_array() || arr.size() != dst.size()) {
            throw Error(std::string("weights JSON: '") + key + "' must have " +
                        std::to_string(dst.size()) + " entries");
        }
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = arr[i].get<double>();
    };
    for (const auto& item : j.items()) {
        static const char* known[] = {"w1", "b1", "w2", "b2", "w3", "b3"};
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                return item.key() == k;
            }) == std::end(known)) {
            throw Error("weights JSON: unknown key '" + item.key() + "'");
        }
    }
    read("w1", w.w1);
    read("b1", w.b1);
    read("w2", w.w2);
    read("b2", w.b2);
    read("w3", w.w3);
    read("b3", w.b3);
    return w;
}

void save_weights(const RegressorWeights& w, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(path + ": cannot open for writing");
    out << weights_to_json(w) << "\n";
    if (!out) throw Error(path + ": write failed");
}

RegressorWeights load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(path + ": cannot open for reading");
    std::stringstream ss;
    ss << in.rdbuf();
    return weights_from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

namespace {

// Partition-wise box average down to 32x32. Blocks are the integer
// partition [floor(i*W/32), floor((i+1)*W/32)); exact block averaging when
// the dimensions divide evenly.
std::vector<double> downsample_input(const GrayMap& img) {
    std::vector<double> x(kInputDim, 0.0);
    for (int by = 0; by < kInputSide; ++by) {
        const int y0 = by * img.height / kInputSide;
        const int y1 = (by + 1) * img.height / kInputSide;
        for (int bx = 0; bx < kInputSide; ++bx) {
            const int x0 = bx * img.width / kInputSide;
            const int x1 = (bx + 1) * img.width / kInputSide;
            double sum = 0.0;
            int count = 0;
            for (int y = y0; y < std::max(y1, y0 + 1); ++y) {
                for (int xx = x0; xx < std::max(x1, x0 + 1); ++xx) {
                    const int cy = std::min(y, img.height - 1);
                    const int cx = std::min(xx, img.width - 1);
                    sum += img.at(cx, cy);
                    ++count;
                }
            }
            x[static_cast<std::size_t>(by) * kInputSide + bx] = sum / count;
        }
    }
    return x;
}

struct ForwardTrace {
    std::vector<double> x;    // 1024
    std::vector<double> h1;   // 64, post-tanh
    std::vector<double> h2;   // 64, post-tanh
    std::array<double, kNumParams> raw{};
};

void dense(const std::vector<double>& w, const std::vector<double>& b,
           const std::vector<double>& in, std::vector<double>& out) {
    const std::size_t rows = b.size(), cols = in.size();
    out.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w.data() + r * cols;
        double acc = b[r];
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * in[c];
        out[r] = acc;
    }
}

ForwardTrace forward_trace(const RegressorWeights& w, const GrayMap& image) {
    ForwardTrace tr;
    tr.x = downsample_input(image);
    dense(w.w1, w.b1, tr.x, tr.h1);
    for (auto& v : tr.h1) v = std::tanh(v);
    dense(w.w2, w.b2, tr.h1, tr.h2);
    for (auto& v : tr.h2) v = std::tanh(v);
    std::vector<double> raw;
    dense(w.w3, w.b3, tr.h2, raw);
    std::copy(raw.begin(), raw.end(), tr.raw.begin());
    return tr;
}

BodyParams head_params(const std::array<double, kNumParams>& raw) {
    BodyParams p;
    for (int i = 0; i < kNumSegments; ++i) p.phi[i] = std::tanh(raw[i]);
    for (int i = 0; i < 3; ++i) p.beta[i] = 1.0 + 0.5 * std::tanh(raw[kNumSegments + i]);
    p.camera.alpha = raw[13];
    p.camera.s = std::exp(raw[14]);
    p.camera.t = {raw[15], raw[16]};
    return p;
}

/// d(constrained output)/d(raw), evaluated from the constrained values.
std::array<double, kNumParams> head_jacobian_diag(const BodyParams& p) {
    std::array<double, kNumParams> d{};
    for (int i = 0; i < kNumSegments; ++i) d[i] = 1.0 - p.phi[i] * p.phi[i];
    for (int i = 0; i < 3; ++i) {
        const double th = 2.0 * (p.beta[i] - 1.0);
        d[kNumSegments + i] = 0.5 * (1.0 - th * th);
    }
    d[13] = 1.0;
    d[14] = p.camera.s;
    d[15] = d[16] = 1.0;
    return d;
}

// Accumulates the weight gradient for one item given dLoss/dRaw.
void backprop_accum(const ForwardTrace& tr, const RegressorWeights& w,
                    const std::array<double, kNumParams>& draw, RegressorWeights& grad) {
    // Output layer.
    for (int r = 0; r < kNumParams; ++r) {
        double* gw = grad.w3.data() + static_cast<std::size_t>(r) * kHiddenDim;
        for (int c = 0; c < kHiddenDim; ++c) gw[c] += draw[r] * tr.h2[c];
        grad.b3[r] += draw[r];
    }
    // Hidden 2.
    std::array<double, kHiddenDim> dp2{};
    for (int c = 0; c < kHiddenDim; ++c) {
        double acc = 0.0;
        for (int r = 0; r < kNumParams; ++r) {
            acc += w.w3[static_cast<std::size_t>(r) * kHiddenDim + c] * draw[r];
        }
        dp2[c] = acc * (1.0 - tr.h2[c] * tr.h2[c]);
    }
    for (int r = 0; r < kHiddenDim; ++r) {
        double* gw = grad.w2.data() + static_cast<std::size_t>(r) * kHiddenDim;
        for (int c = 0; c < kHiddenDim; ++c) gw[c] += dp2[r] * tr.h1[c];
        grad.b2[r] += dp2[r];
    }
    // Hidden 1.
    std::array<double, kHiddenDim> dp1{};
    for (int c = 0; c < kHiddenDim; ++c) {
        double acc = 0.0;
        for (int r = 0; r < kHiddenDim; ++r) {
            acc += w.w2[static_cast<std::size_t>(r) * kHiddenDim + c] * dp2[r];
        }
        dp1[c] = acc * (1.0 - tr.h1[c] * tr.h1[c]);
    }
    for (int r = 0; r < kHiddenDim; ++r) {
        double* gw = grad.w1.data() + static_cast<std::size_t>(r) * kInputDim;
        for (int c = 0; c < kInputDim; ++c) gw[c] += dp1[r] * tr.x[c];
        grad.b1[r] += dp1[r];
    }
}

}  // namespace

BodyParams regressor_forward(const RegressorWeights& w, const GrayMap& image) {
    return head_params(forward_trace(w, image).raw);
}

std::array<double, kNumParams> regressor_forward_raw(const RegressorWeights& w,
                                                     const GrayMap& image) {
    return forward_trace(w, image).raw;
}

// ---------------------------------------------------------------------------
// Supervised loss and gradient
// ---------------------------------------------------------------------------

double theta_loss(const RegressorWeights& w, const std::vector<LabeledSample>& batch) {
    if (batch.empty()) throw Error("theta_loss: empty batch");
    double total = 0.0;
    for (const auto& item : batch) {
        const auto pred = regressor_forward(w, item.image).to_vector();
        const auto tgt = item.target.to_vector();
        for (int i = 0; i < kNumParams; ++i) {
            const double d = pred[i] - tgt[i];
            total += d * d;
        }
    }
    return total / static_cast<double>(batch.size());
}

RegressorWeights supervised_grad(const RegressorWeights& w,
                                 const std::vector<LabeledSample>& batch) {
    if (batch.empty()) throw Error("supervised_grad: empty batch");
    RegressorWeights grad = RegressorWeights::zeros();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (const auto& item : batch) {
        const ForwardTrace tr = forward_trace(w, item.image);
        const BodyParams pred = head_params(tr.raw);
        const auto jac = head_jacobian_diag(pred);
        const auto pv = pred.to_vector();
        const auto tv = item.target.to_vector();
        std::array<double, kNumParams> draw{};
        for (int i = 0; i < kNumParams; ++i) {
            draw[i] = 2.0 * (pv[i] - tv[i]) * inv_b * jac[i];
        }
        backprop_accum(tr, w, draw, grad);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Silhouette-driven gradient
// ---------------------------------------------------------------------------

AdaptObjective AdaptObjective::for_id(const std::string& id) {
    if (id == "b1") return {false, Topo::None};
    if (id == "b2") return {true, Topo::None};
    if (id == "b3") return {true, Topo::PixelL2};
    if (id == "ours") return {true, Topo::Chamfer};
    throw Error("unknown adaptation objective id '" + id + "' (want b1|b2|b3|ours)");
}

AlignTerms alignment_terms(const BinaryMask& pred, const FitTarget& target,
                           const AdaptObjective& objective, bool normalized) {
    AlignTerms terms;
    if (pred.popcount() == 0) {
        const double penalty = empty_prediction_penalty(pred.width, pred.height);
        terms.sil = penalty;
        terms.topo = objective.topo == AdaptObjective::Topo::None ? 0.0 : penalty;
        return terms;
    }
    if (objective.sil_chamfer) {
        std::int64_t raw = 0;
        for (std::size_t i = 0; i < pred.values.size(); ++i) {
            if (pred.values[i]) raw += target.out_sil.values[i];
        }
        raw += detail::outwards_sum_at(pred, target.sil);
        terms.sil = normalized ? static_cast<double>(raw) /
                                     static_cast<double>(target.sil.popcount() + pred.popcount())
                               : static_cast<double>(raw);
    } else {
        const LossValue l2 = pixel_l2(target.sil, pred);
        terms.sil = normalized ? l2.normalized : l2.raw;
    }
    if (objective.topo != AdaptObjective::Topo::None) {
        const Skeleton pred_skel = skeletonize(pred);
        if (objective.topo == AdaptObjective::Topo::Chamfer) {
            std::int64_t raw = 0;
            for (std::size_t i = 0; i < pred_skel.map.values.size(); ++i) {
                if (pred_skel.map.values[i]) raw += target.out_skel.values[i];
            }
            raw += detail::outwards_sum_at(pred_skel.map, target.skel.map);
            terms.topo = normalized
                             ? static_cast<double>(raw) /
                                   static_cast<double>(target.skel.map.popcount() +
                                                       pred_skel.map.popcount())
                             : static_cast<double>(raw);
        } else {
            const LossValue l2 = pixel_l2(target.skel.map, pred_skel.map);
            terms.topo = normalized ? l2.normalized : l2.raw;
        }
    }
    return terms;
}

SilhouetteGrad silhouette_grad(const RegressorWeights& w,
                               const std::vector<SilhouetteBatchItem>& batch,
                               const AdaptObjective& objective, const FitWeights& weights,
                               const FdSteps& fd_steps, int canvas_w, int canvas_h,
                               bool normalized, int jobs) {
    if (batch.empty()) throw Error("silhouette_grad: empty batch");
    const auto lo = param_lower_bounds();
    const auto hi = param_upper_bounds();

    struct ItemResult {
        RegressorWeights grad_topo, grad_sil;
        double topo_loss = 0.0, sil_loss = 0.0;
    };
    std::vector<ItemResult> results(batch.size());

    parallel_for(batch.size(), jobs, [&](std::size_t bi) {
        const auto& item = batch[bi];
        const ForwardTrace tr = forward_trace(w, *item.image);
        const BodyParams pred_params = head_params(tr.raw);
        const auto base = pred_params.to_vector();

        auto probe = [&](const std::array<double, kNumParams>& v) {
            const BodyParams p = BodyParams::from_vector(v);
            return alignment_terms(rasterize(p, canvas_w, canvas_h), *item.target, objective,
                                   normalized);
        };

        const AlignTerms at_base = probe(base);
        std::array<double, kNumParams> d_topo{}, d_sil{};
        for (int i = 0; i < kNumParams; ++i) {
            const double h = fd_steps.for_index(i);
            const double up = clamp(base[i] + h, lo[i], hi[i]);
            const double dn = clamp(base[i] - h, lo[i], hi[i]);
            if (up == dn) continue;
            auto v = base;
            v[i] = up;
            const AlignTerms t_up = probe(v);
            v[i] = dn;
            const AlignTerms t_dn = probe(v);
            d_topo[i] = (t_up.topo - t_dn.topo) / (up - dn);
            d_sil[i] = (t_up.sil - t_dn.sil) / (up - dn);
        }

        const auto jac = head_jacobian_diag(pred_params);
        std::array<double, kNumParams> draw_topo{}, draw_sil{};
        for (int i = 0; i < kNumParams; ++i) {
            draw_topo[i] = weights.w_topo * d_topo[i] * jac[i];
            draw_sil[i] = weights.w_sil * d_sil[i] * jac[i];
        }
        ItemResult& res = results[bi];
        res.grad_topo = RegressorWeights::zeros();
        res.grad_sil = RegressorWeights::zeros();
        backprop_accum(tr, w, draw_topo, res.grad_topo);
        backprop_accum(tr, w, draw_sil, res.grad_sil);
        res.topo_loss = at_base.topo;
        res.sil_loss = at_base.sil;
    });

    // Fixed-order reduction keeps results identical for any job count.
    SilhouetteGrad out;
    out.topo = RegressorWeights::zeros();
    out.sil = RegressorWeights::zeros();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (const auto& res : results) {
        out.topo.add_scaled(res.grad_topo, inv_b);
        out.sil.add_scaled(res.grad_sil, inv_b);
        out.mean_topo_loss += res.topo_loss * inv_b;
        out.mean_sil_loss += res.sil_loss * inv_b;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Training loops
// ---------------------------------------------------------------------------

void TrainLog::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(path + ": cannot open for writing");
    out << "iter,branch,l_t,l_s,l_theta,eval_mpjpe\n";
    for (const auto& row : rows) {
        out << row.iter << "," << row.branch << "," << row.l_topo << "," << row.l_sil << ","
            << row.l_theta << ",";
        if (row.eval_mpjpe) out << *row.eval_mpjpe;
        out << "\n";
    }
    if (!out) throw Error(path + ": write failed");
}

RegressorWeights train_source(const std::vector<LabeledSample>& dataset, const TrainConfig& cfg,
                              TrainLog* log) {
    if (dataset.empty()) throw Error("train_source: empty dataset");
    RegressorWeights w = RegressorWeights::glorot(cfg.seed);
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the documented generator.
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        double epoch_loss = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
            std::vector<LabeledSample> batch;
            for (std::size_t k = start; k < std::min(order.size(), start + cfg.batch); ++k) {
                batch.push_back(dataset[order[k]]);
            }
            epoch_loss += theta_loss(w, batch);
            const RegressorWeights grad = supervised_grad(w, batch);
            w.add_scaled(grad, -cfg.lr);
            ++batches;
        }
        if (log) {
            log->rows.push_back({epoch, "source", 0.0, 0.0, epoch_loss / batches, std::nullopt});
        }
    }
    return w;
}

RegressorWeights adapt(const RegressorWeights& w0, const TargetView& target,
                       const AdaptConfig& cfg, const AdaptObjective& objective, TrainLog* log,
                       const EvalCallback& eval_cb) {
    if (target.size() == 0) throw Error("adapt: empty target dataset");
    if (cfg.K < 2) throw Error("adapt: K must be at least 2");
    const int canvas_w = target.images[0].width;
    const int canvas_h = target.images[0].height;

    // Target-side caches never change; build them once.
    std::vector<FitTarget> caches;
    caches.reserve(target.size());
    for (const auto& sil : target.sils) {
        if (sil.popcount() == 0) throw Error("adapt: target item has an empty silhouette");
        caches.push_back(FitTarget::from_mask(sil));
    }

    RegressorWeights w = w0;
    Rng rng(cfg.seed);
    FitConfig fit_cfg;
    fit_cfg.max_iters = cfg.max_iter_opt;
    fit_cfg.fd_steps = cfg.fd_steps;
    fit_cfg.weights = cfg.fit_weights;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        // Seeded batch draw; documented order, one draw per slot.
        std::vector<std::size_t> idx(static_cast<std::size_t>(cfg.batch));
        for (auto& i : idx) i = static_cast<std::size_t>(rng.below(target.size()));

        TrainLogRow row{iter, "", 0.0, 0.0, 0.0, std::nullopt};
        if (iter % cfg.K != 0) {
            row.branch = "direct";
            std::vector<SilhouetteBatchItem> batch;
            batch.reserve(idx.size());
            for (auto i : idx) batch.push_back({&target.images[i], &caches[i]});
            const SilhouetteGrad g =
                silhouette_grad(w, batch, objective, cfg.fit_weights, cfg.fd_steps, canvas_w,
                                canvas_h, /*normalized=*/true, cfg.jobs);
            w.add_scaled(g.topo, -cfg.lr_T);
            w.add_scaled(g.sil, -cfg.lr_S);
            row.l_topo = g.mean_topo_loss;
            row.l_sil = g.mean_sil_loss;
        } else {
            row.branch = "fit";
            // Fit each item's parameters from the regressor's estimate,
            // then take one supervised step toward the fitted values.
            std::vector<BodyParams> fitted(idx.size());
            std::vector<double> topo_sum(idx.size(), 0.0), sil_sum(idx.size(), 0.0);
            parallel_for(idx.size(), cfg.jobs, [&](std::size_t k) {
                const std::size_t i = idx[k];
                const BodyParams init = regressor_forward(w, target.images[i]);
                const FitTarget& cache = caches[i];
                auto objective_fn = [&](const BodyParams& p) {
                    const AlignTerms terms = alignment_terms(
                        rasterize(p, canvas_w, canvas_h), cache, objective, true);
                    FitLoss loss;
                    loss.topo = terms.topo;
                    loss.sil = terms.sil;
                    const double db0 = p.beta[0] - 1.0, db1 = p.beta[1] - 1.0,
                                 db2 = p.beta[2] - 1.0;
                    loss.reg = db0 * db0 + db1 * db1 + db2 * db2;
                    loss.total = cfg.fit_weights.w_topo * loss.topo +
                                 cfg.fit_weights.w_sil * loss.sil +
                                 cfg.fit_weights.w_beta * loss.reg;
                    return loss;
                };
                const FitResult res = fit_with_objective(init, fit_cfg, objective_fn);
                fitted[k] = res.params;
                topo_sum[k] = res.trace.back().topo;
                sil_sum[k] = res.trace.back().sil;
            });
            std::vector<LabeledSample> batch;
            batch.reserve(idx.size());
            for (std::size_t k = 0; k < idx.size(); ++k) {
                batch.push_back({target.images[idx[k]], fitted[k]});
            }
            row.l_theta = theta_loss(w, batch);
            const RegressorWeights grad = supervised_grad(w, batch);
            w.add_scaled(grad, -cfg.lr_theta);
            for (std::size_t k = 0; k < idx.size(); ++k) {
                row.l_topo += topo_sum[k] / idx.size();
                row.l_sil += sil_sum[k] / idx.size();
            }
        }
        if (eval_cb && (iter % cfg.eval_cadence == 0 || iter + 1 == cfg.max_iter)) {
            row.eval_mpjpe = eval_cb(w);
        }
        if (log) log->rows.push_back(std::move(row));
    }
    return w;
}

}  // namespace silt
