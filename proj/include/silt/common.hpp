#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace silt {

/// Thrown for every data/validation failure (malformed files, contract
/// violations, dimension mismatches). The CLI maps it to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    // z-component of the 3D cross product; sign gives orientation.
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

/// Rotate by angle radians (counter-clockwise in a y-up frame; our pixel
/// frame has y growing downwards, so positive angles turn clockwise on
/// screen -- the convention is fixed, tests pin it).
inline Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline double clamp(double v, double lo, double hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace silt
