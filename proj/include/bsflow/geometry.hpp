#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace bsflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// z-component of the 2d cross product a x b.
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Rotate by -90 degrees; for a CCW-oriented curve this turns the unit
/// tangent into the outward unit normal.
inline Vec2 rot_minus90(const Vec2& a) { return Vec2(a.y(), -a.x()); }

/// Twice the signed area of triangle (a,b,c); positive for CCW.
inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross2(b - a, c - a);
}

struct Quad1d {
    std::vector<double> points;  // on [0,1]
    std::vector<double> weights; // sum to 1
};

/// Gauss-Legendre rules mapped to [0,1]; n in {1,2,3}.
const Quad1d& gauss_segment(int n);

struct QuadTri {
    // barycentric coordinates (l0,l1,l2) and weights summing to 1
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};

/// 7-point degree-5 rule on the reference triangle.
const QuadTri& tri_quadrature_deg5();

/// Shoelace area of a simple polygon, signed (positive CCW).
double polygon_signed_area(const std::vector<Vec2>& poly);

/// Area moments (A, Ix = integral of x dA, Iy = integral of y dA) of a polygon
/// via Green's theorem; valid for any closed vertex chain, including the
/// degenerate bridge edges produced by clipping.
void polygon_moments(const std::vector<Vec2>& poly, double& area, double& ix, double& iy);

/// Sutherland-Hodgman clip of `subject` against the convex region described by
/// half-planes n.x <= d (inside). Returns the intersection chain.
std::vector<Vec2> clip_polygon_convex(const std::vector<Vec2>& subject,
                                      const std::vector<Vec2>& clip_convex_ccw);

/// Winding number point-in-polygon test. Points within `eps` of an edge are
/// resolved by a deterministic perturbation.
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly, double eps = 1e-13);

/// True if segments [a,b] and [c,d] intersect (including touching).
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// Distance from point p to segment [a,b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

} // namespace bsflow
