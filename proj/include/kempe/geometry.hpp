#pragma once

#include <cmath>
#include <utility>

namespace kempe {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }

inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    return n > 0.0 ? a / n : Vec2{1.0, 0.0};
}

// Complex product: rotates/scales a by b.
inline Vec2 cmul(Vec2 a, Vec2 b) { return {a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x}; }
inline Vec2 conj(Vec2 a) { return {a.x, -a.y}; }

// Reflection of p across the line through a and b.
inline Vec2 reflect_line(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 u = normalized(b - a);
    Vec2 v = p - a;
    Vec2 proj = u * dot(v, u);
    return a + proj * 2.0 - v;
}

// Intersection points of circle(c1,r1) and circle(c2,r2).
// `ok` is false when the circles do not meet (beyond slack).
struct CircleHit {
    bool ok = false;
    Vec2 p_ccw;  // positive cross(c2-c1, p-c1)
    Vec2 p_cw;
};

inline CircleHit circle_circle(Vec2 c1, double r1, Vec2 c2, double r2, double slack = 1e-9) {
    CircleHit hit;
    Vec2 d = c2 - c1;
    double L = norm(d);
    if (L < 1e-300) return hit;
    double a = (L * L + r1 * r1 - r2 * r2) / (2.0 * L);
    double h2 = r1 * r1 - a * a;
    if (h2 < 0.0) {
        if (h2 < -slack * std::max(1.0, r1 * r1)) return hit;
        h2 = 0.0;
    }
    double h = std::sqrt(h2);
    Vec2 u = d / L;
    Vec2 n = rot90(u);
    hit.ok = true;
    hit.p_ccw = c1 + u * a + n * h;
    hit.p_cw = c1 + u * a - n * h;
    return hit;
}

// Two-bar elbow: point at distance ra from a and rb from b, counterclockwise
// branch (positive cross(b-a, e-a)) when ccw is true.
inline CircleHit elbow(Vec2 a, double ra, Vec2 b, double rb) {
    return circle_circle(a, ra, b, rb);
}

// Intersection of the line through p,q with the line through o along dir.
// Returns parameter t so the point is o + t*dir; `ok` false when parallel.
struct LineHit {
    bool ok = false;
    double t = 0.0;
    Vec2 point;
};

inline LineHit line_intersect_axis(Vec2 p, Vec2 q, Vec2 o, Vec2 dir) {
    LineHit hit;
    Vec2 d = q - p;
    double denom = cross(d, dir);
    if (std::abs(denom) < 1e-14 * std::max(1.0, norm(d) * norm(dir))) return hit;
    // Solve p + u*d = o + t*dir.
    double u = cross(o - p, dir) / denom;
    hit.point = p + d * u;
    hit.t = dot(hit.point - o, dir) / dot(dir, dir);
    hit.ok = true;
    return hit;
}

}  // namespace kempe
