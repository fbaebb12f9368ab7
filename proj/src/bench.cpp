#include "silt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "silt/parallel.hpp"
#include "silt/pgm.hpp"
#include "silt/rng.hpp"

namespace fs = std::filesystem;

namespace silt {

namespace {
constexpr int kUapBlock = 4;
}

DomainShift DomainShift::lowres(int factor) {
    if (factor < 2) throw Error("lowres factor must be at least 2");
    DomainShift s;
    s.kind = Kind::LowRes;
    s.factor = factor;
    return s;
}

DomainShift DomainShift::uap(double epsilon, std::uint64_t noise_seed) {
    if (epsilon < 0.0) throw Error("uap epsilon must be non-negative");
    DomainShift s;
    s.kind = Kind::Uap;
    s.epsilon = epsilon;
    s.noise_seed = noise_seed;
    return s;
}

GrayMap uap_noise(int w, int h, double epsilon, std::uint64_t noise_seed) {
    const int bw = (w + kUapBlock - 1) / kUapBlock;
    const int bh = (h + kUapBlock - 1) / kUapBlock;
    Rng rng(noise_seed);
    std::vector<double> blocks(static_cast<std::size_t>(bw) * bh);
    for (auto& b : blocks) b = rng.uniform(-epsilon, epsilon);
    GrayMap noise(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            noise.set(x, y, blocks[static_cast<std::size_t>(y / kUapBlock) * bw + x / kUapBlock]);
        }
    }
    return noise;
}

GrayMap apply_shift(const GrayMap& image, const DomainShift& shift) {
    switch (shift.kind) {
        case DomainShift::Kind::Clean:
            return image;
        case DomainShift::Kind::LowRes: {
            const int f = shift.factor;
            if (f >= std::min(image.width, image.height)) {
                throw Error("lowres factor must be smaller than both image dimensions");
            }
            const int lw = (image.width + f - 1) / f;
            const int lh = (image.height + f - 1) / f;
            GrayMap low(lw, lh);
            for (int by = 0; by < lh; ++by) {
                for (int bx = 0; bx < lw; ++bx) {
                    double sum = 0.0;
                    int count = 0;
                    for (int y = by * f; y < std::min((by + 1) * f, image.height); ++y) {
                        for (int x = bx * f; x < std::min((bx + 1) * f, image.width); ++x) {
                            sum += image.at(x, y);
                            ++count;
                        }
                    }
                    low.set(bx, by, sum / count);
                }
            }
            GrayMap up(image.width, image.height);
            for (int y = 0; y < image.height; ++y) {
                for (int x = 0; x < image.width; ++x) {
                    up.set(x, y, low.at(x / f, y / f));
                }
            }
            return up;
        }
        case DomainShift::Kind::Uap: {
            const GrayMap noise =
                uap_noise(image.width, image.height, shift.epsilon, shift.noise_seed);
            GrayMap out(image.width, image.height);
            for (std::size_t i = 0; i < out.values.size(); ++i) {
                out.values[i] = clamp(image.values[i] + noise.values[i], 0.0, 1.0);
            }
            return out;
        }
    }
    throw Error("apply_shift: unreachable");
}

std::vector<Sample> gen_dataset(int n, std::uint64_t seed, const DomainShift& shift,
                                int canvas_w, int canvas_h) {
    if (n < 1) throw Error("gen_dataset: n must be at least 1");
    Rng rng(seed);
    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        BodyParams p;
        for (auto& v : p.phi) v = rng.uniform(-0.6, 0.6);
        for (auto& v : p.beta) v = rng.uniform(0.85, 1.15);
        p.camera.alpha = rng.uniform(-0.3, 0.3);
        p.camera.s = rng.uniform(0.8, 1.2);
        p.camera.t = {rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0)};
        p.clamp_to_box();

        Sample s;
        s.params = p;
        s.sil = rasterize(p, canvas_w, canvas_h);
        s.joints = forward_kinematics(p, canvas_w, canvas_h);
        s.image = apply_shift(render_image(p, canvas_w, canvas_h), shift);
        samples.push_back(std::move(s));
    }
    return samples;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double mpjpe(const Pose2D& pred, const Pose2D& gt) {
    double total = 0.0;
    for (int j = 0; j < kNumJoints; ++j) {
        total += (pred[j] - gt[j]).norm();
    }
    return total / kNumJoints;
}

Similarity procrustes_align(const Pose2D& pred, const Pose2D& gt) {
    Vec2 cp{0, 0}, cg{0, 0};
    for (int j = 0; j < kNumJoints; ++j) {
        cp = cp + pred[j];
        cg = cg + gt[j];
    }
    cp = cp * (1.0 / kNumJoints);
    cg = cg * (1.0 / kNumJoints);

    double dot = 0.0, cross = 0.0, norm_p = 0.0;
    for (int j = 0; j < kNumJoints; ++j) {
        const Vec2 p = pred[j] - cp;
        const Vec2 g = gt[j] - cg;
        dot += p.dot(g);
        cross += p.cross(g);
        norm_p += p.norm2();
    }
    if (norm_p <= 0.0) throw Error("procrustes_align: degenerate prediction (all joints coincide)");

    Similarity sim;
    sim.angle = std::atan2(cross, dot);
    sim.scale = (std::cos(sim.angle) * dot + std::sin(sim.angle) * cross) / norm_p;
    sim.t = cg - rotate(cp, sim.angle) * sim.scale;
    return sim;
}

double pa_mpjpe(const Pose2D& pred, const Pose2D& gt) {
    const Similarity sim = procrustes_align(pred, gt);
    Pose2D aligned;
    for (int j = 0; j < kNumJoints; ++j) aligned.joints[j] = sim.apply(pred[j]);
    return mpjpe(aligned, gt);
}

MetricsReport evaluate(const RegressorWeights& w, const std::vector<Sample>& samples) {
    MetricsReport report;
    report.n = static_cast<int>(samples.size());
    report.per_sample_mpjpe.resize(samples.size());
    report.per_sample_pa.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const BodyParams pred = regressor_forward(w, samples[i].image);
        const Pose2D joints =
            forward_kinematics(pred, samples[i].image.width, samples[i].image.height);
        report.per_sample_mpjpe[i] = mpjpe(joints, samples[i].joints);
        report.per_sample_pa[i] = pa_mpjpe(joints, samples[i].joints);
        report.mpjpe += report.per_sample_mpjpe[i];
        report.pa_mpjpe += report.per_sample_pa[i];
    }
    if (report.n > 0) {
        report.mpjpe /= report.n;
        report.pa_mpjpe /= report.n;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Disk format
// ---------------------------------------------------------------------------

namespace {

std::string index_name(int i, const char* suffix) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%05d%s", i, suffix);
    return buf;
}

nlohmann::ordered_json shift_to_json(const DomainShift& shift) {
    nlohmann::ordered_json j;
    switch (shift.kind) {
        case DomainShift::Kind::Clean:
            j["kind"] = "clean";
            break;
        case DomainShift::Kind::LowRes:
            j["kind"] = "lowres";
            j["factor"] = shift.factor;
            break;
        case DomainShift::Kind::Uap:
            j["kind"] = "uap";
            j["epsilon"] = shift.epsilon;
            j["noise_seed"] = shift.noise_seed;
            break;
    }
    return j;
}

}  // namespace

void save_dataset(const std::vector<Sample>& samples, const std::string& dir, std::uint64_t seed,
                  const DomainShift& shift, int jobs) {
    fs::create_directories(dir);
    parallel_for(samples.size(), jobs, [&](std::size_t i) {
        const auto& s = samples[i];
        const fs::path base = fs::path(dir);
        save_pgm(s.image, (base / index_name(static_cast<int>(i), ".img.pgm")).string());
        save_pgm(s.sil, (base / index_name(static_cast<int>(i), ".sil.pgm")).string());
        save_params(s.params, (base / index_name(static_cast<int>(i), ".params.json")).string());
    });
    nlohmann::ordered_json manifest;
    manifest["seed"] = seed;
    manifest["shift"] = shift_to_json(shift);
    manifest["canvas"] = {samples.empty() ? 0 : samples[0].image.width,
                          samples.empty() ? 0 : samples[0].image.height};
    manifest["count"] = samples.size();
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::trunc);
    if (!out) throw Error(dir + "/manifest.json: cannot open for writing");
    out << manifest.dump(2) << "\n";
}

namespace {

int dataset_count(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw Error(dir + ": missing manifest.json");
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw Error(dir + "/manifest.json: " + e.what());
    }
    if (!manifest.contains("count")) throw Error(dir + "/manifest.json: missing count");
    return manifest["count"].get<int>();
}

}  // namespace

std::vector<Sample> load_dataset(const std::string& dir) {
    const int n = dataset_count(dir);
    std::vector<Sample> samples(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const fs::path base = fs::path(dir);
        Sample& s = samples[static_cast<std::size_t>(i)];
        s.image = load_pgm((base / index_name(i, ".img.pgm")).string());
        s.sil = load_mask((base / index_name(i, ".sil.pgm")).string());
        s.params = load_params((base / index_name(i, ".params.json")).string());
        s.joints = forward_kinematics(s.params, s.image.width, s.image.height);
    }
    return samples;
}

TargetView load_target_view(const std::string& dir) {
    const int n = dataset_count(dir);
    TargetView view;
    view.images.reserve(static_cast<std::size_t>(n));
    view.sils.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const fs::path base = fs::path(dir);
        view.images.push_back(load_pgm((base / index_name(i, ".img.pgm")).string()));
        view.sils.push_back(load_mask((base / index_name(i, ".sil.pgm")).string()));
    }
    return view;
}

std::vector<LabeledSample> to_labeled(const std::vector<Sample>& samples) {
    std::vector<LabeledSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({s.image, s.params});
    return out;
}

TargetView to_target_view(const std::vector<Sample>& samples) {
    TargetView view;
    view.images.reserve(samples.size());
    view.sils.reserve(samples.size());
    for (const auto& s : samples) {
        view.images.push_back(s.image);
        view.sils.push_back(s.sil);
    }
    return view;
}

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

std::string ReportTable::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        j.push_back({{"method", row.method},
                     {"phase", row.phase},
                     {"mpjpe", row.mpjpe},
                     {"pa_mpjpe", row.pa_mpjpe},
                     {"n", row.n}});
    }
    return j.dump(2);
}

void ReportTable::write_json(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(path + ": cannot open for writing");
    out << to_json() << "\n";
}

void ReportTable::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(path + ": cannot open for writing");
    out << "method,phase,mpjpe,pa_mpjpe,n\n";
    for (const auto& row : rows) {
        out << row.method << "," << row.phase << "," << row.mpjpe << "," << row.pa_mpjpe << ","
            << row.n << "\n";
    }
}

ReportTable run_ablation(const RegressorWeights& source_weights, const TargetView& target,
                         const std::vector<Sample>& eval_set, const AblationConfig& cfg) {
    ReportTable table;
    const MetricsReport pre = evaluate(source_weights, eval_set);
    table.rows.push_back({"pre", "pre", pre.mpjpe, pre.pa_mpjpe, pre.n});
    for (const auto& id : cfg.variants) {
        const AdaptObjective objective = AdaptObjective::for_id(id);
        const RegressorWeights adapted = adapt(source_weights, target, cfg.adapt, objective);
        const MetricsReport post = evaluate(adapted, eval_set);
        table.rows.push_back({id, "post", post.mpjpe, post.pa_mpjpe, post.n});
    }
    return table;
}

}  // namespace silt
