#include "bsflow/geometry.hpp"

#include <cmath>

namespace bsflow {

const Quad1d& gauss_segment(int n) {
    static const Quad1d g1{{0.5}, {1.0}};
    static const double a2 = 0.5 - 0.5 / std::sqrt(3.0);
    static const Quad1d g2{{a2, 1.0 - a2}, {0.5, 0.5}};
    static const double a3 = 0.5 - 0.5 * std::sqrt(3.0 / 5.0);
    static const Quad1d g3{{a3, 0.5, 1.0 - a3}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
    switch (n) {
    case 1: return g1;
    case 2: return g2;
    default: return g3;
    }
}

const QuadTri& tri_quadrature_deg5() {
    // classic 7-point rule, exact for polynomials of degree 5
    static const QuadTri q = [] {
        QuadTri r;
        const double a = (6.0 + std::sqrt(15.0)) / 21.0;
        const double b = (6.0 - std::sqrt(15.0)) / 21.0;
        const double wa = (155.0 + std::sqrt(15.0)) / 1200.0;
        const double wb = (155.0 - std::sqrt(15.0)) / 1200.0;
        r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weights.push_back(9.0 / 40.0);
        auto add3 = [&r](double l, double w) {
            r.points.push_back({1.0 - 2.0 * l, l, l});
            r.points.push_back({l, 1.0 - 2.0 * l, l});
            r.points.push_back({l, l, 1.0 - 2.0 * l});
            r.weights.insert(r.weights.end(), 3, w);
        };
        add3(a, wa);
        add3(b, wb);
        return r;
    }();
    return q;
}

double polygon_signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) a += cross2(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

void polygon_moments(const std::vector<Vec2>& poly, double& area, double& ix, double& iy) {
    area = ix = iy = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double c = cross2(p, q);
        area += c;
        ix += (p.x() + q.x()) * c;
        iy += (p.y() + q.y()) * c;
    }
    area *= 0.5;
    ix /= 6.0;
    iy /= 6.0;
}

std::vector<Vec2> clip_polygon_convex(const std::vector<Vec2>& subject,
                                      const std::vector<Vec2>& clip) {
    std::vector<Vec2> out = subject;
    const size_t m = clip.size();
    for (size_t e = 0; e < m && !out.empty(); ++e) {
        const Vec2& ca = clip[e];
        const Vec2& cb = clip[(e + 1) % m];
        std::vector<Vec2> in;
        in.swap(out);
        const size_t n = in.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec2& p = in[i];
            const Vec2& q = in[(i + 1) % n];
            const double sp = orient2d(ca, cb, p);
            const double sq = orient2d(ca, cb, q);
            if (sp >= 0.0) {
                out.push_back(p);
                if (sq < 0.0) {
                    const double t = sp / (sp - sq);
                    out.push_back(p + t * (q - p));
                }
            } else if (sq >= 0.0) {
                const double t = sp / (sp - sq);
                out.push_back(p + t * (q - p));
            }
        }
    }
    return out;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly, double eps) {
    // winding number with a deterministic nudge off edges
    Vec2 z = p;
    const size_t n = poly.size();
    for (int attempt = 0; attempt < 3; ++attempt) {
        bool on_edge = false;
        int winding = 0;
        for (size_t i = 0; i < n; ++i) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[(i + 1) % n];
            if (point_segment_distance(z, a, b) < eps) {
                on_edge = true;
                break;
            }
            if (a.y() <= z.y()) {
                if (b.y() > z.y() && orient2d(a, b, z) > 0.0) ++winding;
            } else {
                if (b.y() <= z.y() && orient2d(a, b, z) < 0.0) --winding;
            }
        }
        if (!on_edge) return winding != 0;
        z += Vec2(3.0 * eps, 7.0 * eps);
    }
    return false;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = orient2d(c, d, a);
    const double d2 = orient2d(c, d, b);
    const double d3 = orient2d(a, b, c);
    const double d4 = orient2d(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return orient2d(p, q, r) == 0.0 && r.x() >= std::min(p.x(), q.x()) &&
               r.x() <= std::max(p.x(), q.x()) && r.y() >= std::min(p.y(), q.y()) &&
               r.y() <= std::max(p.y(), q.y());
    };
    return on(c, d, a) || on(c, d, b) || on(a, b, c) || on(a, b, d);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

} // namespace bsflow
