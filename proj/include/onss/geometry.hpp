#pragma once

#include <cmath>

namespace onss {

inline constexpr double kTau = 6.283185307179586476925286766559;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    // 90-degree counterclockwise rotation
    Vec2 perp() const { return {-y, x}; }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Axis-aligned rectangle, closed on all sides.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(Vec2 p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

// Maps an arbitrary angle into [0, 2*pi).
inline double normalize_angle(double a) {
    a = std::fmod(a, kTau);
    if (a < 0.0) a += kTau;
    if (a >= kTau) a = 0.0;  // fmod rounding can land exactly on 2*pi
    return a;
}

}  // namespace onss
