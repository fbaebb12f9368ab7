#include "silt/body.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace silt {

namespace {
constexpr double kMinScale = 1e-9;
constexpr double kLegSplay = 0.22;  // radians off vertical at rest
}  // namespace

void BodyParams::clamp_to_box() {
    for (auto& v : phi) v = clamp(v, -1.0, 1.0);
    for (auto& v : beta) v = clamp(v, 0.5, 2.0);
    if (!(camera.s > 0.0)) camera.s = kMinScale;
}

std::array<double, kNumParams> BodyParams::to_vector() const {
    std::array<double, kNumParams> v{};
    for (int i = 0; i < kNumSegments; ++i) v[i] = phi[i];
    for (int i = 0; i < 3; ++i) v[kNumSegments + i] = beta[i];
    v[13] = camera.alpha;
    v[14] = camera.s;
    v[15] = camera.t.x;
    v[16] = camera.t.y;
    return v;
}

BodyParams BodyParams::from_vector(const std::array<double, kNumParams>& v) {
    BodyParams p;
    for (int i = 0; i < kNumSegments; ++i) p.phi[i] = v[i];
    for (int i = 0; i < 3; ++i) p.beta[i] = v[kNumSegments + i];
    p.camera.alpha = v[13];
    p.camera.s = v[14];
    p.camera.t = {v[15], v[16]};
    p.clamp_to_box();
    return p;
}

BodyParams make_params(const std::array<double, kNumSegments>& phi,
                       const std::array<double, 3>& beta, const Camera& camera) {
    BodyParams p;
    p.phi = phi;
    p.beta = beta;
    p.camera = camera;
    p.clamp_to_box();
    return p;
}

const std::array<Segment, kNumSegments>& skeleton_tree() {
    static const std::array<Segment, kNumSegments> tree = [] {
        const double a = std::sqrt(0.5);  // arms rest 45 degrees below horizontal
        const Vec2 up{0.0, -1.0};
        const Vec2 arm_l{-a, a}, arm_r{a, a};
        const Vec2 leg_l{-std::sin(kLegSplay), std::cos(kLegSplay)};
        const Vec2 leg_r{std::sin(kLegSplay), std::cos(kLegSplay)};
        return std::array<Segment, kNumSegments>{{
            {"torso", -1, kPelvis, kNeck, up, 0.16, RadiusClass::Torso, -0.35, 0.35},
            {"head", 0, kNeck, kHeadTop, up, 0.07, RadiusClass::Torso, -0.50, 0.50},
            {"l_upper_arm", 0, kNeck, kLeftElbow, arm_l, 0.085, RadiusClass::Limb, -1.20, 1.20},
            {"l_forearm", 2, kLeftElbow, kLeftWrist, arm_l, 0.075, RadiusClass::Limb, -1.50, 1.50},
            {"r_upper_arm", 0, kNeck, kRightElbow, arm_r, 0.085, RadiusClass::Limb, -1.20, 1.20},
            {"r_forearm", 4, kRightElbow, kRightWrist, arm_r, 0.075, RadiusClass::Limb, -1.50, 1.50},
            {"l_thigh", -1, kPelvis, kLeftKnee, leg_l, 0.12, RadiusClass::Limb, -0.80, 0.80},
            {"l_shin", 6, kLeftKnee, kLeftAnkle, leg_l, 0.105, RadiusClass::Limb, -1.30, 1.30},
            {"r_thigh", -1, kPelvis, kRightKnee, leg_r, 0.12, RadiusClass::Limb, -0.80, 0.80},
            {"r_shin", 8, kRightKnee, kRightAnkle, leg_r, 0.105, RadiusClass::Limb, -1.30, 1.30},
        }};
    }();
    return tree;
}

const std::array<const char*, kNumJoints>& joint_names() {
    static const std::array<const char*, kNumJoints> names{
        "pelvis",  "neck",    "head_top", "l_elbow", "l_wrist", "r_elbow",
        "r_wrist", "l_knee",  "l_ankle",  "r_knee",  "r_ankle"};
    return names;
}

std::array<double, kNumSegments> decode_pose(const std::array<double, kNumSegments>& phi) {
    const auto& tree = skeleton_tree();
    std::array<double, kNumSegments> angles{};
    for (int i = 0; i < kNumSegments; ++i) {
        const double p = clamp(phi[i], -1.0, 1.0);
        angles[i] = tree[i].angle_lo + 0.5 * (p + 1.0) * (tree[i].angle_hi - tree[i].angle_lo);
    }
    return angles;
}

Pose2D forward_kinematics(const BodyParams& params, int canvas_w, int canvas_h) {
    const auto& tree = skeleton_tree();
    const auto angles = decode_pose(params.phi);
    const double len_scale = body_scale(canvas_h) * params.beta[0];

    // Body frame: pelvis at the origin, segments chained in table order
    // (parents always precede children).
    std::array<Vec2, kNumJoints> body{};
    std::array<double, kNumSegments> cum{};
    for (int i = 0; i < kNumSegments; ++i) {
        const Segment& seg = tree[i];
        cum[i] = (seg.parent_segment >= 0 ? cum[seg.parent_segment] : 0.0) + angles[i];
        const Vec2 dir = rotate(seg.rest_direction, cum[i]);
        body[seg.end_joint] = body[seg.start_joint] + dir * (seg.rest_length * len_scale);
    }

    const Vec2 center{0.5 * canvas_w, 0.5 * canvas_h};
    Pose2D pose;
    for (int j = 0; j < kNumJoints; ++j) {
        pose.joints[j] = rotate(body[j], params.camera.alpha) * params.camera.s +
                         params.camera.t + center;
    }
    return pose;
}

namespace {

struct Capsule {
    Vec2 a, b;
    double r;
};

std::array<Capsule, kNumSegments> make_capsules(const BodyParams& params, int canvas_w,
                                                int canvas_h) {
    const auto pose = forward_kinematics(params, canvas_w, canvas_h);
    const auto& tree = skeleton_tree();
    const double rad_scale = body_scale(canvas_h) * params.camera.s;
    std::array<Capsule, kNumSegments> caps;
    for (int i = 0; i < kNumSegments; ++i) {
        const Segment& seg = tree[i];
        const double base = seg.radius_class == RadiusClass::Torso ? kTorsoRadius : kLimbRadius;
        const double width = seg.radius_class == RadiusClass::Torso ? params.beta[1]
                                                                    : params.beta[2];
        caps[i] = {pose[seg.start_joint], pose[seg.end_joint], base * rad_scale * width};
    }
    return caps;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    if (len2 == 0.0) return (p - a).norm();
    const double t = clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

double signed_capsule_distance(Vec2 p, const std::array<Capsule, kNumSegments>& caps) {
    double d = 1e30;
    for (const auto& c : caps) {
        d = std::min(d, segment_distance(p, c.a, c.b) - c.r);
    }
    return d;
}

}  // namespace

BinaryMask rasterize(const BodyParams& params, int canvas_w, int canvas_h) {
    const auto caps = make_capsules(params, canvas_w, canvas_h);

    // Figure bounding box in pixel indices; everything outside stays 0.
    double lox = 1e30, loy = 1e30, hix = -1e30, hiy = -1e30;
    for (const auto& c : caps) {
        lox = std::min({lox, c.a.x - c.r, c.b.x - c.r});
        hix = std::max({hix, c.a.x + c.r, c.b.x + c.r});
        loy = std::min({loy, c.a.y - c.r, c.b.y - c.r});
        hiy = std::max({hiy, c.a.y + c.r, c.b.y + c.r});
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(lox - 0.5)));
    const int x1 = std::min(canvas_w - 1, static_cast<int>(std::ceil(hix)));
    const int y0 = std::max(0, static_cast<int>(std::floor(loy - 0.5)));
    const int y1 = std::min(canvas_h - 1, static_cast<int>(std::ceil(hiy)));

    BinaryMask mask(canvas_w, canvas_h);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const Vec2 p{x + 0.5, y + 0.5};
            if (signed_capsule_distance(p, caps) <= 0.0) mask.set(x, y, 1);
        }
    }
    return mask;
}

GrayMap render_image(const BodyParams& params, int canvas_w, int canvas_h,
                     const RenderStyle& style) {
    if (!(style.tau > 0.0)) throw Error("render_image: tau must be positive");
    if (style.fg < 0.0 || style.fg > 1.0 || style.bg < 0.0 || style.bg > 1.0) {
        throw Error("render_image: fg/bg levels must lie in [0,1]");
    }
    const auto caps = make_capsules(params, canvas_w, canvas_h);
    GrayMap img(canvas_w, canvas_h);
    for (int y = 0; y < canvas_h; ++y) {
        for (int x = 0; x < canvas_w; ++x) {
            const Vec2 p{x + 0.5, y + 0.5};
            const double d = signed_capsule_distance(p, caps);
            const double sig = 1.0 / (1.0 + std::exp(d / style.tau));
            img.set(x, y, clamp(style.bg + (style.fg - style.bg) * sig, 0.0, 1.0));
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> keys,
                  const std::string& where) {
    for (const auto& item : j.items()) {
        if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
                return item.key() == k;
            }) == keys.end()) {
            throw Error(where + ": unknown key '" + item.key() + "'");
        }
    }
    for (const char* k : keys) {
        if (!j.contains(k)) throw Error(where + ": missing key '" + k + "'");
    }
}

}  // namespace

std::string params_to_json(const BodyParams& p) {
    ordered_json j;
    j["phi"] = p.phi;
    j["beta"] = p.beta;
    j["camera"] = ordered_json{{"alpha", p.camera.alpha},
                               {"s", p.camera.s},
                               {"t", std::array<double, 2>{p.camera.t.x, p.camera.t.y}}};
    return j.dump();
}

BodyParams params_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("params JSON: ") + e.what());
    }
    require_keys(j, {"phi", "beta", "camera"}, "params JSON");
    require_keys(j["camera"], {"alpha", "s", "t"}, "params JSON camera");
    const auto& jp = j["phi"];
    const auto& jb = j["beta"];
    const auto& jt = j["camera"]["t"];
    if (!jp.is_array() || jp.size() != kNumSegments) throw Error("params JSON: phi must have 10 entries");
    if (!jb.is_array() || jb.size() != 3) throw Error("params JSON: beta must have 3 entries");
    if (!jt.is_array() || jt.size() != 2) throw Error("params JSON: camera.t must have 2 entries");

    BodyParams p;
    for (int i = 0; i < kNumSegments; ++i) p.phi[i] = jp[i].get<double>();
    for (int i = 0; i < 3; ++i) p.beta[i] = jb[i].get<double>();
    p.camera.alpha = j["camera"]["alpha"].get<double>();
    p.camera.s = j["camera"]["s"].get<double>();
    p.camera.t = {jt[0].get<double>(), jt[1].get<double>()};
    p.clamp_to_box();
    return p;
}

void save_params(const BodyParams& p, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(path + ": cannot open for writing");
    out << params_to_json(p) << "\n";
    if (!out) throw Error(path + ": write failed");
}

BodyParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(path + ": cannot open for reading");
    std::stringstream ss;
    ss << in.rdbuf();
    return params_from_json(ss.str());
}

}  // namespace silt
