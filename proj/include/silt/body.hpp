#pragma once

#include <array>
#include <string>

#include "silt/common.hpp"
#include "silt/mask.hpp"

namespace silt {

// ---------------------------------------------------------------------------
// Parameter layout. The flat 17-vector order is phi[0..9], beta[0..2],
// alpha, s, t.x, t.y everywhere: finite differences, the regressor output
// head, and the parameter-space supervision loss all share it.
// ---------------------------------------------------------------------------

inline constexpr int kNumSegments = 10;
inline constexpr int kNumJoints = 11;
inline constexpr int kNumParams = 17;

/// Weak-perspective camera: rotation, uniform scale, pixel translation.
/// Applied after posing: p -> s * R(alpha) * p + t + canvas_center.
struct Camera {
    double alpha = 0.0;
    double s = 1.0;
    Vec2 t{0.0, 0.0};
};

/// Latent pose, shape, camera. Construction clamps phi into [-1,1] and
/// beta into [0.5,2.0]; s is forced positive.
struct BodyParams {
    std::array<double, kNumSegments> phi{};
    std::array<double, 3> beta{1.0, 1.0, 1.0};  // length, torso width, limb width
    Camera camera;

    /// Re-applies the construction clamps; call after arithmetic on fields.
    void clamp_to_box();

    std::array<double, kNumParams> to_vector() const;
    static BodyParams from_vector(const std::array<double, kNumParams>& v);
};

BodyParams make_params(const std::array<double, kNumSegments>& phi,
                       const std::array<double, 3>& beta, const Camera& camera);

/// JSON round-trip with fixed key order:
/// {"phi":[10],"beta":[3],"camera":{"alpha":..,"s":..,"t":[2]}}
std::string params_to_json(const BodyParams& p);
BodyParams params_from_json(const std::string& text);
void save_params(const BodyParams& p, const std::string& path);
BodyParams load_params(const std::string& path);

// ---------------------------------------------------------------------------
// Static skeleton tree. All geometry constants live here; the canonical
// rest pose (phi = 0, beta = 1, identity camera) is frozen in the golden
// fixtures and must not drift.
// ---------------------------------------------------------------------------

enum class RadiusClass { Torso, Limb };

struct Segment {
    const char* name;
    int parent_segment;   // index into kSegments, -1 for roots
    int start_joint;      // joint the segment grows from
    int end_joint;        // joint placed at the segment tip
    Vec2 rest_direction;  // unit vector, canonical units (y grows downward)
    double rest_length;   // canonical units; all lengths sum to 1
    RadiusClass radius_class;
    double angle_lo;  // joint angle range, radians
    double angle_hi;
};

enum Joint : int {
    kPelvis = 0,
    kNeck,
    kHeadTop,
    kLeftElbow,
    kLeftWrist,
    kRightElbow,
    kRightWrist,
    kLeftKnee,
    kLeftAnkle,
    kRightKnee,
    kRightAnkle,
};

/// Segment table: torso and head form the spine chain; arms root at the
/// neck, legs at the pelvis (legs do not inherit the torso rotation).
const std::array<Segment, kNumSegments>& skeleton_tree();

const std::array<const char*, kNumJoints>& joint_names();

/// Canonical bone lengths sum to body_scale(H) pixels at s = 1.
inline double body_scale(int canvas_height) { return 0.8 * canvas_height; }

/// Base capsule radii in canonical units (multiplied by body_scale, camera
/// scale and the matching beta width component at rasterization time).
inline constexpr double kTorsoRadius = 0.048;
inline constexpr double kLimbRadius = 0.022;

/// 11 named joint positions in pixel coordinates.
struct Pose2D {
    std::array<Vec2, kNumJoints> joints{};

    Vec2 operator[](int j) const { return joints[static_cast<std::size_t>(j)]; }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Affine decode: angle_j = lo_j + (phi_j + 1)/2 * (hi_j - lo_j).
/// phi = 0 maps to the range midpoint; inputs are clamped, never rejected.
std::array<double, kNumSegments> decode_pose(const std::array<double, kNumSegments>& phi);

/// Chains segments from the pelvis, applies the camera, and returns joint
/// pixel positions. The pelvis sits at canvas_center + t.
Pose2D forward_kinematics(const BodyParams& params, int canvas_w, int canvas_h);

/// Hard binary coverage test of the capsule union, sampled at pixel
/// centers (x + 0.5, y + 0.5). No anti-aliasing; deterministic.
BinaryMask rasterize(const BodyParams& params, int canvas_w, int canvas_h);

/// Soft grayscale rendering for regressor input:
/// intensity = bg + (fg - bg) * sigmoid(-d / tau), d the signed capsule
/// distance in pixels. Clamped to [0,1].
struct RenderStyle {
    double fg = 0.9;
    double bg = 0.1;
    double tau = 1.0;  // edge softness in pixels, > 0
};
GrayMap render_image(const BodyParams& params, int canvas_w, int canvas_h,
                     const RenderStyle& style = {});

}  // namespace silt
