#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "silt/body.hpp"
#include "silt/fitting.hpp"
#include "silt/mask.hpp"

namespace silt {

inline constexpr int kInputSide = 32;
inline constexpr int kInputDim = kInputSide * kInputSide;
inline constexpr int kHiddenDim = 64;

/// Fully-connected regressor: 1024 -> 64 (tanh) -> 64 (tanh) -> 17 raw.
/// The output head maps raw values to a valid BodyParams by construction:
/// phi = tanh(raw), beta = 1 + 0.5*tanh(raw), alpha raw, s = exp(raw),
/// t raw. Also reused as gradient storage (same shape).
struct RegressorWeights {
    std::vector<double> w1, b1;  // 64 x 1024, 64
    std::vector<double> w2, b2;  // 64 x 64, 64
    std::vector<double> w3, b3;  // 17 x 64, 17

    static RegressorWeights zeros();
    static RegressorWeights glorot(std::uint64_t seed);

    void add_scaled(const RegressorWeights& g, double factor);
    bool operator==(const RegressorWeights&) const = default;
};

std::string weights_to_json(const RegressorWeights& w);
RegressorWeights weights_from_json(const std::string& text);
void save_weights(const RegressorWeights& w, const std::string& path);
RegressorWeights load_weights(const std::string& path);

/// Box-averages an arbitrary image partition-wise down to 32x32 and runs
/// the network. The returned params satisfy every BodyParams invariant.
BodyParams regressor_forward(const RegressorWeights& w, const GrayMap& image);

/// Raw 17-vector of the output layer (pre-head), for gradient checks.
std::array<double, kNumParams> regressor_forward_raw(const RegressorWeights& w,
                                                     const GrayMap& image);

// ---------------------------------------------------------------------------
// Losses over the network
// ---------------------------------------------------------------------------

struct LabeledSample {
    GrayMap image;
    BodyParams target;
};

/// Parameter-space supervision: squared L2 over the flat 17-vector,
/// averaged over the batch.
double theta_loss(const RegressorWeights& w, const std::vector<LabeledSample>& batch);

/// Exact reverse-mode gradient of theta_loss.
RegressorWeights supervised_grad(const RegressorWeights& w,
                                 const std::vector<LabeledSample>& batch);

/// Which alignment terms drive adaptation. `for_id` accepts the benchmark
/// row ids "b1" (pixel L2 only), "b2" (silhouette Chamfer only),
/// "b3" (silhouette Chamfer + pixel L2 on skeletons) and "ours"
/// (silhouette + topology Chamfer).
struct AdaptObjective {
    enum class Topo { None, PixelL2, Chamfer };
    bool sil_chamfer = true;  // false: pixel L2 on raw silhouettes
    Topo topo = Topo::Chamfer;

    static AdaptObjective for_id(const std::string& id);
};

/// Data terms of the adaptation objective for one prediction against one
/// cached target; both penalty-valued when the prediction is empty.
struct AlignTerms {
    double topo = 0.0;
    double sil = 0.0;
};
AlignTerms alignment_terms(const BinaryMask& pred, const FitTarget& target,
                           const AdaptObjective& objective, bool normalized);

struct SilhouetteBatchItem {
    const GrayMap* image;
    const FitTarget* target;
};

/// Silhouette-driven weight gradient: central differences over the 17
/// network outputs (one rasterization per probe), chained through the
/// analytic output-head and network Jacobians. The topology and
/// silhouette components are returned separately so the two configured
/// learning rates can apply independently.
struct SilhouetteGrad {
    RegressorWeights topo;
    RegressorWeights sil;
    double mean_topo_loss = 0.0;
    double mean_sil_loss = 0.0;
};
SilhouetteGrad silhouette_grad(const RegressorWeights& w,
                               const std::vector<SilhouetteBatchItem>& batch,
                               const AdaptObjective& objective, const FitWeights& weights,
                               const FdSteps& fd_steps, int canvas_w, int canvas_h,
                               bool normalized, int jobs);

// ---------------------------------------------------------------------------
// Training entry points
// ---------------------------------------------------------------------------

struct TrainConfig {
    int epochs = 100;
    double lr = 0.01;
    int batch = 16;
    std::uint64_t seed = 1;
};

struct TrainLogRow {
    int iter;
    std::string branch;  // "source" | "direct" | "fit"
    double l_topo = 0.0;
    double l_sil = 0.0;
    double l_theta = 0.0;
    std::optional<double> eval_mpjpe;
};

struct TrainLog {
    std::vector<TrainLogRow> rows;
    void write_csv(const std::string& path) const;
};

/// Mini-batch gradient descent on the parameter-space loss over a labeled
/// source set. Deterministic for a fixed seed.
RegressorWeights train_source(const std::vector<LabeledSample>& dataset, const TrainConfig& cfg,
                              TrainLog* log = nullptr);

/// Label-stripped view of a target-domain dataset: images plus clean
/// silhouettes, nothing else. The adaptation path only ever sees this
/// type, so ground-truth parameters are unreachable by construction.
struct TargetView {
    std::vector<GrayMap> images;
    std::vector<BinaryMask> sils;

    std::size_t size() const { return images.size(); }
};

struct AdaptConfig {
    int K = 4;
    int max_iter = 40;
    int max_iter_opt = 10;  // inner fitting iterations ("MaxIter_opt")
    double lr_T = 2e-4;
    double lr_S = 2e-4;
    double lr_theta = 0.05;
    int batch = 16;
    FdSteps fd_steps;
    FitWeights fit_weights;
    std::uint64_t seed = 7;
    int eval_cadence = 10;
    int jobs = 1;
};

/// Optional metric snapshot hook, invoked at the configured cadence. The
/// callback owns whatever labeled evaluation data it needs; adapt itself
/// never touches labels.
using EvalCallback = std::function<double(const RegressorWeights&)>;

/// Self-supervised adaptation schedule: iterations with iter mod K != 0
/// take a direct silhouette-gradient step; the others fit each batch
/// item's parameters (initialized from the regressor) for max_iter_opt
/// iterations and take one supervised step toward the fitted values.
RegressorWeights adapt(const RegressorWeights& w, const TargetView& target,
                       const AdaptConfig& cfg, const AdaptObjective& objective,
                       TrainLog* log = nullptr, const EvalCallback& eval_cb = nullptr);

}  // namespace silt
