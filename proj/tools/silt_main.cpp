// Command-line front end: every pipeline stage as a subcommand over PGM,
// JSON and CSV files. All diagnostics go to stderr; machine output goes to
// files or stdout as JSON. Exit codes: 0 success, 1 usage, 2 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "silt/bench.hpp"
#include "silt/pgm.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using silt::Error;

silt::Outside parse_direction_outside(const std::string& direction) {
    if (direction == "in") return silt::Outside::Zero;
    if (direction == "out") return silt::Outside::One;
    throw Error("direction must be 'in' or 'out'");
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (item.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw Error(where + ": unknown key '" + item.key() + "'");
    }
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(path + ": cannot open for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": " + e.what());
    }
    return j;
}

silt::FdSteps fd_steps_from_json(const nlohmann::json& j, const std::string& where) {
    reject_unknown_keys(j, {"angles", "translation", "scale", "beta"}, where);
    silt::FdSteps steps;
    if (j.contains("angles")) steps.angles = j["angles"].get<double>();
    if (j.contains("translation")) steps.translation = j["translation"].get<double>();
    if (j.contains("scale")) steps.scale = j["scale"].get<double>();
    if (j.contains("beta")) steps.beta = j["beta"].get<double>();
    return steps;
}

silt::AdaptConfig adapt_config_from_json(const std::string& path) {
    const nlohmann::json j = load_json_file(path);
    reject_unknown_keys(j,
                        {"K", "max_iter", "MaxIter_opt", "lr_T", "lr_S", "lr_theta", "batch",
                         "fd_steps", "seed", "eval_cadence"},
                        path);
    silt::AdaptConfig cfg;
    if (j.contains("K")) cfg.K = j["K"].get<int>();
    if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<int>();
    if (j.contains("MaxIter_opt")) cfg.max_iter_opt = j["MaxIter_opt"].get<int>();
    if (j.contains("lr_T")) cfg.lr_T = j["lr_T"].get<double>();
    if (j.contains("lr_S")) cfg.lr_S = j["lr_S"].get<double>();
    if (j.contains("lr_theta")) cfg.lr_theta = j["lr_theta"].get<double>();
    if (j.contains("batch")) cfg.batch = j["batch"].get<int>();
    if (j.contains("fd_steps")) cfg.fd_steps = fd_steps_from_json(j["fd_steps"], path);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("eval_cadence")) cfg.eval_cadence = j["eval_cadence"].get<int>();
    return cfg;
}

silt::TrainConfig train_config_from_json(const std::string& path) {
    const nlohmann::json j = load_json_file(path);
    reject_unknown_keys(j, {"epochs", "lr", "batch", "seed"}, path);
    silt::TrainConfig cfg;
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
    if (j.contains("lr")) cfg.lr = j["lr"].get<double>();
    if (j.contains("batch")) cfg.batch = j["batch"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

silt::DomainShift shift_from_flags(const std::string& kind, int factor, double eps,
                                   std::uint64_t noise_seed) {
    if (kind == "clean") return silt::DomainShift::clean();
    if (kind == "lowres") return silt::DomainShift::lowres(factor);
    if (kind == "uap") return silt::DomainShift::uap(eps, noise_seed);
    throw Error("unknown shift kind '" + kind + "' (want clean|lowres|uap)");
}

// distmap/skeletonize share the erosion-rule switch.
silt::DistanceMap run_s2d(const silt::BinaryMask& mask, silt::Outside outside,
                          const std::string& erosion) {
    if (erosion == "strict") return silt::s2d(mask, outside);
    if (erosion != "paper-literal") throw Error("erosion rule must be strict or paper-literal");
    // Literal thinning rule, summed to a distance-map analog. Guarded
    // against non-termination (hole filling can cycle in principle).
    silt::DistanceMap dist(mask.width, mask.height);
    silt::BinaryMask cur = mask;
    const int cap = mask.width + mask.height + 2;
    for (int i = 0; i <= cap; ++i) {
        if (cur.popcount() == 0) return dist;
        for (std::size_t k = 0; k < cur.values.size(); ++k) dist.values[k] += cur.values[k];
        cur = silt::erode_once_paper_literal(cur, outside);
    }
    throw Error("paper-literal erosion did not reach a fixpoint; input not representable");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"silhouette topology toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion) + " (erosion rule: strict)");
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for batch subcommands")->capture_default_str();

    // --- gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    std::string gen_out, gen_shift = "clean";
    int gen_n = 16, gen_factor = 2, gen_w = 128, gen_h = 128;
    double gen_eps = 16.0 / 255.0;
    std::uint64_t gen_seed = 1, gen_noise_seed = 99;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--n", gen_n, "sample count")->required();
    gen->add_option("--seed", gen_seed, "dataset seed");
    gen->add_option("--shift", gen_shift, "clean|lowres|uap");
    gen->add_option("--factor", gen_factor, "lowres factor");
    gen->add_option("--eps", gen_eps, "uap noise bound");
    gen->add_option("--noise-seed", gen_noise_seed, "uap noise seed");
    gen->add_option("--width", gen_w, "canvas width");
    gen->add_option("--height", gen_h, "canvas height");

    // --- render ------------------------------------------------------------
    auto* render = app.add_subcommand("render", "rasterize body params to a mask");
    std::string render_params, render_out, render_image_path;
    int render_w = 128, render_h = 128;
    double render_fg = 0.9, render_bg = 0.1, render_tau = 1.0;
    render->add_option("--params", render_params, "params JSON")->required();
    render->add_option("--out", render_out, "output mask PGM")->required();
    render->add_option("--image", render_image_path, "also write the soft grayscale image");
    render->add_option("--width", render_w, "canvas width");
    render->add_option("--height", render_h, "canvas height");
    render->add_option("--fg", render_fg, "image foreground level");
    render->add_option("--bg", render_bg, "image background level");
    render->add_option("--tau", render_tau, "image edge softness (px)");

    // --- distmap -----------------------------------------------------------
    auto* distmap = app.add_subcommand("distmap", "distance map of a mask");
    std::string dist_in, dist_out, dist_dir = "in", dist_erosion = "strict";
    distmap->add_option("--in", dist_in, "input mask PGM")->required();
    distmap->add_option("--out", dist_out, "output PGM (rescaled to maxval 255)")->required();
    distmap->add_option("--direction", dist_dir, "in|out")->required();
    distmap->add_option("--erosion", dist_erosion, "strict|paper-literal");

    // --- skeletonize ---------------------------------------------------------
    auto* skel = app.add_subcommand("skeletonize", "topological skeleton of a mask");
    std::string skel_in, skel_out, skel_overlay, skel_erosion = "strict";
    skel->add_option("--in", skel_in, "input mask PGM")->required();
    skel->add_option("--out", skel_out, "output skeleton PGM")->required();
    skel->add_option("--overlay", skel_overlay, "write mask at gray 96 with skeleton at 255");
    skel->add_option("--erosion", skel_erosion, "strict|paper-literal");

    // --- loss ----------------------------------------------------------------
    auto* loss_cmd = app.add_subcommand("loss", "alignment loss between two masks");
    std::string loss_kind, loss_a, loss_b;
    bool loss_normalized = false;
    loss_cmd->add_option("--kind", loss_kind, "topo|sil|l2|chamfer")->required();
    loss_cmd->add_option("--a", loss_a, "first mask PGM")->required();
    loss_cmd->add_option("--b", loss_b, "second mask PGM")->required();
    loss_cmd->add_flag("--normalized", loss_normalized, "report the normalized value as primary");

    // --- fit -----------------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "fit body params to a target silhouette");
    std::string fit_target, fit_init, fit_out, fit_trace;
    int fit_iters = 10;
    double fit_w_t = 1.0, fit_w_s = 1.0, fit_w_beta = 0.1;
    fit_cmd->add_option("--target", fit_target, "target mask PGM")->required();
    fit_cmd->add_option("--init", fit_init, "initial params JSON")->required();
    fit_cmd->add_option("--out", fit_out, "fitted params JSON")->required();
    fit_cmd->add_option("--trace", fit_trace, "loss trace CSV (iter,total,l_t,l_s,reg)");
    fit_cmd->add_option("--iters", fit_iters, "max fitting iterations");
    fit_cmd->add_option("--w-t", fit_w_t, "topology loss weight");
    fit_cmd->add_option("--w-s", fit_w_s, "silhouette loss weight");
    fit_cmd->add_option("--w-beta", fit_w_beta, "shape prior weight");

    // --- train -----------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "source-supervised regressor training");
    std::string train_config, train_data, train_out, train_log;
    train_cmd->add_option("--config", train_config, "train config JSON")->required();
    train_cmd->add_option("--data", train_data, "labeled dataset directory")->required();
    train_cmd->add_option("--out", train_out, "output weights JSON")->required();
    train_cmd->add_option("--log", train_log, "training log CSV");

    // --- adapt -----------------------------------------------------------------
    auto* adapt_cmd = app.add_subcommand("adapt", "silhouette-only target adaptation");
    std::string adapt_weights, adapt_target, adapt_config, adapt_out, adapt_log, adapt_eval;
    std::string adapt_variant = "ours";
    adapt_cmd->add_option("--weights", adapt_weights, "source weights JSON")->required();
    adapt_cmd->add_option("--target", adapt_target, "target dataset directory")->required();
    adapt_cmd->add_option("--config", adapt_config, "adapt config JSON")->required();
    adapt_cmd->add_option("--out", adapt_out, "adapted weights JSON")->required();
    adapt_cmd->add_option("--log", adapt_log, "adaptation log CSV");
    adapt_cmd->add_option("--variant", adapt_variant, "b1|b2|b3|ours");
    adapt_cmd->add_option("--eval", adapt_eval, "labeled dataset for metric snapshots");

    // --- eval ------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "evaluate weights on a labeled dataset");
    std::string eval_weights, eval_data, eval_report, eval_csv;
    eval_cmd->add_option("--weights", eval_weights, "weights JSON")->required();
    eval_cmd->add_option("--data", eval_data, "labeled dataset directory")->required();
    eval_cmd->add_option("--report", eval_report, "output report JSON");
    eval_cmd->add_option("--csv", eval_csv, "output report CSV");

    // --- ablate ------------------------------------------------------------------
    auto* ablate_cmd = app.add_subcommand("ablate", "run all adaptation loss variants");
    std::string ab_weights, ab_target, ab_eval, ab_config, ab_out, ab_csv;
    ablate_cmd->add_option("--weights", ab_weights, "source weights JSON")->required();
    ablate_cmd->add_option("--target", ab_target, "target dataset directory")->required();
    ablate_cmd->add_option("--eval", ab_eval, "labeled evaluation dataset directory")->required();
    ablate_cmd->add_option("--config", ab_config, "adapt config JSON")->required();
    ablate_cmd->add_option("--out", ab_out, "report JSON")->required();
    ablate_cmd->add_option("--csv", ab_csv, "report CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);  // usage errors and --help/--version exits
    }

    try {
        if (*gen) {
            const auto shift = shift_from_flags(gen_shift, gen_factor, gen_eps, gen_noise_seed);
            const auto samples = silt::gen_dataset(gen_n, gen_seed, shift, gen_w, gen_h);
            silt::save_dataset(samples, gen_out, gen_seed, shift, jobs);
        } else if (*render) {
            const auto params = silt::load_params(render_params);
            silt::save_pgm(silt::rasterize(params, render_w, render_h), render_out);
            if (!render_image_path.empty()) {
                silt::save_pgm(silt::render_image(params, render_w, render_h,
                                                  {render_fg, render_bg, render_tau}),
                               render_image_path);
            }
        } else if (*distmap) {
            const auto mask = silt::load_mask(dist_in);
            const bool inward = parse_direction_outside(dist_dir) == silt::Outside::Zero;
            const silt::DistanceMap dist =
                inward ? run_s2d(mask, silt::Outside::Zero, dist_erosion)
                       : run_s2d(silt::invert(mask), silt::Outside::One, dist_erosion);
            silt::save_pgm(silt::to_gray(dist), dist_out);
            nlohmann::ordered_json side;
            side["max"] = dist.max_value();
            side["direction"] = dist_dir;
            std::ofstream sidecar(dist_out + ".json", std::ios::trunc);
            if (!sidecar) throw Error(dist_out + ".json: cannot open for writing");
            sidecar << side.dump() << "\n";
        } else if (*skel) {
            const auto mask = silt::load_mask(skel_in);
            const silt::DistanceMap dist = run_s2d(mask, silt::Outside::Zero, skel_erosion);
            const silt::Skeleton sk = silt::d2t(dist, mask);
            silt::save_pgm(sk.map, skel_out);
            if (!skel_overlay.empty()) {
                silt::GrayMap overlay(mask.width, mask.height);
                for (std::size_t i = 0; i < overlay.values.size(); ++i) {
                    overlay.values[i] = sk.map.values[i] ? 1.0
                                        : mask.values[i] ? 96.0 / 255.0
                                                         : 0.0;
                }
                silt::save_pgm(overlay, skel_overlay);
            }
        } else if (*loss_cmd) {
            const auto a = silt::load_mask(loss_a);
            const auto b = silt::load_mask(loss_b);
            silt::LossValue v;
            if (loss_kind == "topo") {
                v = silt::spatial_chamfer(silt::skeletonize(a).map, silt::skeletonize(b).map);
            } else if (loss_kind == "sil") {
                v = silt::spatial_chamfer(a, b);
            } else if (loss_kind == "l2") {
                v = silt::pixel_l2(a, b);
            } else if (loss_kind == "chamfer") {
                v = silt::chamfer_pointset(silt::active_points(a), silt::active_points(b));
            } else {
                throw Error("unknown loss kind '" + loss_kind + "' (want topo|sil|l2|chamfer)");
            }
            nlohmann::ordered_json j;
            j["raw"] = v.raw;
            j["normalized"] = v.normalized;
            j["primary"] = loss_normalized ? v.normalized : v.raw;
            std::cout << j.dump() << "\n";
        } else if (*fit_cmd) {
            const auto target = silt::load_mask(fit_target);
            const auto init = silt::load_params(fit_init);
            silt::FitConfig cfg;
            cfg.max_iters = fit_iters;
            cfg.weights = {fit_w_t, fit_w_s, fit_w_beta};
            const silt::FitResult res = silt::fit(target, init, cfg);
            silt::save_params(res.params, fit_out);
            if (!fit_trace.empty()) {
                std::ofstream tr(fit_trace, std::ios::trunc);
                if (!tr) throw Error(fit_trace + ": cannot open for writing");
                tr << "iter,total,l_t,l_s,reg\n";
                for (std::size_t i = 0; i < res.trace.size(); ++i) {
                    const auto& row = res.trace[i];
                    tr << i << "," << row.total << "," << row.topo << "," << row.sil << ","
                       << row.reg << "\n";
                }
            }
        } else if (*train_cmd) {
            const auto cfg = train_config_from_json(train_config);
            const auto dataset = silt::to_labeled(silt::load_dataset(train_data));
            silt::TrainLog log;
            const auto weights = silt::train_source(dataset, cfg, &log);
            silt::save_weights(weights, train_out);
            if (!train_log.empty()) log.write_csv(train_log);
        } else if (*adapt_cmd) {
            auto cfg = adapt_config_from_json(adapt_config);
            cfg.jobs = jobs;
            const auto weights = silt::load_weights(adapt_weights);
            const auto view = silt::load_target_view(adapt_target);
            const auto objective = silt::AdaptObjective::for_id(adapt_variant);
            silt::TrainLog log;
            silt::EvalCallback eval_cb;
            std::vector<silt::Sample> eval_set;
            if (!adapt_eval.empty()) {
                eval_set = silt::load_dataset(adapt_eval);
                eval_cb = [&eval_set](const silt::RegressorWeights& w) {
                    return silt::evaluate(w, eval_set).mpjpe;
                };
            }
            const auto adapted = silt::adapt(weights, view, cfg, objective, &log, eval_cb);
            silt::save_weights(adapted, adapt_out);
            if (!adapt_log.empty()) log.write_csv(adapt_log);
        } else if (*eval_cmd) {
            const auto weights = silt::load_weights(eval_weights);
            const auto samples = silt::load_dataset(eval_data);
            const silt::MetricsReport report = silt::evaluate(weights, samples);
            nlohmann::ordered_json j;
            j["mpjpe"] = report.mpjpe;
            j["pa_mpjpe"] = report.pa_mpjpe;
            j["n"] = report.n;
            if (!eval_report.empty()) {
                std::ofstream out(eval_report, std::ios::trunc);
                if (!out) throw Error(eval_report + ": cannot open for writing");
                out << j.dump(2) << "\n";
            }
            if (!eval_csv.empty()) {
                std::ofstream out(eval_csv, std::ios::trunc);
                if (!out) throw Error(eval_csv + ": cannot open for writing");
                out << "method,phase,mpjpe,pa_mpjpe,n\neval,pre," << report.mpjpe << ","
                    << report.pa_mpjpe << "," << report.n << "\n";
            }
            std::cout << j.dump() << "\n";
        } else if (*ablate_cmd) {
            silt::AblationConfig cfg;
            cfg.adapt = adapt_config_from_json(ab_config);
            cfg.adapt.jobs = jobs;
            const auto weights = silt::load_weights(ab_weights);
            const auto view = silt::load_target_view(ab_target);
            const auto eval_set = silt::load_dataset(ab_eval);
            const silt::ReportTable table = silt::run_ablation(weights, view, eval_set, cfg);
            table.write_json(ab_out);
            if (!ab_csv.empty()) table.write_csv(ab_csv);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
