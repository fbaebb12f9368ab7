// Writes the golden fixtures under a target directory. Run once from a
// verified build, inspect (--preview prints masks as ASCII art), then
// commit the outputs; tests compare against them bit-exactly.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "silt/bench.hpp"
#include "silt/fitting.hpp"
#include "silt/pgm.hpp"
#include "silt/topology.hpp"

namespace fs = std::filesystem;
using namespace silt;

namespace {


void print_overlay(const BinaryMask& mask, const BinaryMask& skel) {
    for (int y = 0; y < mask.height; ++y) {
        std::string line;
        for (int x = 0; x < mask.width; ++x) {
            line += skel.at(x, y) ? '*' : mask.at(x, y) ? '#' : '.';
        }
        std::cout << line << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    const bool preview = argc > 1 && std::string(argv[1]) == "--preview";
    const std::string dir = argc > (preview ? 2 : 1) ? argv[preview ? 2 : 1] : "tests/fixtures";

    const BodyParams canonical;  // phi 0, beta 1, identity camera
    const BinaryMask canonical_mask = rasterize(canonical, 128, 128);
    const Pose2D canonical_pose = forward_kinematics(canonical, 128, 128);

    if (preview) {
        std::cout << "canonical 128x128 mask with skeleton overlay:\n";
        print_overlay(canonical_mask, skeletonize(canonical_mask).map);
        return 0;
    }

    fs::create_directories(dir);
    save_pgm(canonical_mask, dir + "/canonical_128.pgm");

    nlohmann::ordered_json pose_json;
    for (int j = 0; j < kNumJoints; ++j) {
        pose_json[joint_names()[j]] = {canonical_pose[j].x, canonical_pose[j].y};
    }
    {
        std::ofstream out(dir + "/canonical_pose.json", std::ios::trunc);
        out << pose_json.dump(2) << "\n";
    }

    // Frozen three-sample clean dataset (seed 42).
    const auto samples = gen_dataset(3, 42, DomainShift::clean(), 128, 128);
    for (int i = 0; i < 3; ++i) {
        save_pgm(samples[i].sil, dir + "/gen3_" + std::to_string(i) + ".sil.pgm");
        save_params(samples[i].params, dir + "/gen3_" + std::to_string(i) + ".params.json");
    }

    // Fit losses for the generating params and a 3 px translation of them.
    const Sample& s = samples[0];
    const FitTarget target = FitTarget::from_mask(s.sil);
    BodyParams shifted = s.params;
    shifted.camera.t.x += 3.0;
    const FitLoss at_gt = total_fit_loss(s.params, target, {}, /*normalized=*/false, 128, 128);
    const FitLoss at_shift = total_fit_loss(shifted, target, {}, /*normalized=*/false, 128, 128);
    nlohmann::ordered_json loss_json;
    loss_json["at_ground_truth"] = {{"topo", at_gt.topo}, {"sil", at_gt.sil}};
    loss_json["translated_3px"] = {{"topo", at_shift.topo}, {"sil", at_shift.sil}};
    {
        std::ofstream out(dir + "/fit_loss_golden.json", std::ios::trunc);
        out << loss_json.dump(2) << "\n";
    }

    std::cout << "fixtures written to " << dir << "\n";
    return 0;
}
