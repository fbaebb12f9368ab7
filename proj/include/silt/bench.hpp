#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "silt/body.hpp"
#include "silt/regressor.hpp"

namespace silt {

/// One generated benchmark item. The silhouette is always clean (the
/// domain shift touches only the image); both invariants
/// sil == rasterize(params) and joints == forward_kinematics(params)
/// hold by construction.
struct Sample {
    GrayMap image;
    BinaryMask sil;
    BodyParams params;
    Pose2D joints;
};

struct DomainShift {
    enum class Kind { Clean, LowRes, Uap };
    Kind kind = Kind::Clean;
    int factor = 2;              // lowres: downsample factor, >= 2
    double epsilon = 0.0;        // uap: noise bound in intensity units
    std::uint64_t noise_seed = 0;

    static DomainShift clean() { return {}; }
    static DomainShift lowres(int factor);
    static DomainShift uap(double epsilon, std::uint64_t noise_seed);
};

/// The single fixed perturbation pattern of a uap domain. Block-constant
/// at 4-pixel granularity so it survives the regressor's box-downsampling
/// the way a perturbation crafted against the network would; every value
/// is uniform in [-epsilon, epsilon].
GrayMap uap_noise(int w, int h, double epsilon, std::uint64_t noise_seed);

/// clean: identity. lowres: partition box-downsample by `factor`, then
/// nearest-neighbor upsample back. uap: add the domain's fixed noise
/// pattern and clamp to [0,1].
GrayMap apply_shift(const GrayMap& image, const DomainShift& shift);

/// Deterministic sampling: per sample, in order, phi[0..9] ~ U[-0.6,0.6],
/// beta[0..2] ~ U[0.85,1.15], alpha ~ U[-0.3,0.3], s ~ U[0.8,1.2],
/// t ~ U[-8,8]^2.
std::vector<Sample> gen_dataset(int n, std::uint64_t seed, const DomainShift& shift,
                                int canvas_w, int canvas_h);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double mpjpe(const Pose2D& pred, const Pose2D& gt);

/// Closed-form least-squares 2D similarity (rotation-only, reflections
/// excluded) aligning pred onto gt. Degenerate predictions (all joints
/// coincident) are an error.
struct Similarity {
    double scale = 1.0;
    double angle = 0.0;
    Vec2 t{0.0, 0.0};

    Vec2 apply(Vec2 p) const { return rotate(p, angle) * scale + t; }
};
Similarity procrustes_align(const Pose2D& pred, const Pose2D& gt);

double pa_mpjpe(const Pose2D& pred, const Pose2D& gt);

struct MetricsReport {
    double mpjpe = 0.0;
    double pa_mpjpe = 0.0;
    std::vector<double> per_sample_mpjpe;
    std::vector<double> per_sample_pa;
    int n = 0;
};

/// Runs the regressor on every sample image and scores predicted joints
/// against ground truth.
MetricsReport evaluate(const RegressorWeights& w, const std::vector<Sample>& samples);

// ---------------------------------------------------------------------------
// Disk format
// ---------------------------------------------------------------------------

/// Layout: dir/{i:05}.img.pgm, dir/{i:05}.sil.pgm, dir/{i:05}.params.json,
/// plus dir/manifest.json carrying seed, shift, canvas and count.
void save_dataset(const std::vector<Sample>& samples, const std::string& dir,
                  std::uint64_t seed, const DomainShift& shift, int jobs = 1);
std::vector<Sample> load_dataset(const std::string& dir);

/// Loads images and silhouettes only; params files are never opened. This
/// is the only view the adaptation path accepts.
TargetView load_target_view(const std::string& dir);

std::vector<LabeledSample> to_labeled(const std::vector<Sample>& samples);
TargetView to_target_view(const std::vector<Sample>& samples);

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

struct AblationConfig {
    AdaptConfig adapt;
    std::vector<std::string> variants{"b1", "b2", "b3", "ours"};
};

struct ReportRow {
    std::string method;  // "pre" or a variant id
    std::string phase;   // "pre" | "post"
    double mpjpe = 0.0;
    double pa_mpjpe = 0.0;
    int n = 0;
};

struct ReportTable {
    std::vector<ReportRow> rows;
    std::string to_json() const;
    void write_json(const std::string& path) const;
    void write_csv(const std::string& path) const;  // method,phase,mpjpe,pa_mpjpe,n
};

/// Runs adapt once per variant from the same source weights with an
/// identical seed/schedule, swapping only the alignment objective, and
/// reports pre- and post-adaptation metrics on the evaluation set.
ReportTable run_ablation(const RegressorWeights& source_weights, const TargetView& target,
                         const std::vector<Sample>& eval_set, const AblationConfig& cfg);

}  // namespace silt
