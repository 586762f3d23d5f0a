#include "bsflow/surface_calculus.hpp"

#include "bsflow/errors.hpp"

namespace bsflow {

SegmentFrame::SegmentFrame(const Vec2& q1, const Vec2& q2) {
    const Vec2 e = q2 - q1;
    length = e.norm();
    if (length == 0.0) throw GeometricError("degenerate segment");
    t = e / length;
    nu = rot_minus90(t);
    projection = Mat2::Identity() - nu * nu.transpose();
    map.col(0) = e;
    map.col(1) = nu;
}

SegmentFrame segment_frame(const InterfacePolygon& poly, int j) {
    return SegmentFrame(poly.vertex(poly.seg_vertex(j, 0)), poly.vertex(poly.seg_vertex(j, 1)));
}

Vec2 surface_gradient(const SegmentFrame& s, double f1, double f2) {
    return ((f2 - f1) / s.length) * s.t;
}

std::array<Vec2, 2> hat_gradients(const SegmentFrame& s) {
    const Vec2 g = s.t / s.length;
    return {-g, g};
}

Mat2 surface_gradient(const SegmentFrame& s, const Vec2& u1, const Vec2& u2) {
    // row i is the surface gradient of component i
    return ((u2 - u1) / s.length) * s.t.transpose();
}

RateOfDeformation rate_of_deformation(const SegmentFrame& s, const Vec2& u1, const Vec2& u2) {
    RateOfDeformation r;
    const Mat2 g = surface_gradient(s, u1, u2);
    r.Ds = 0.5 * s.projection * (g + g.transpose()) * s.projection;
    r.div_s = g.trace();
    r.Ds_dev = r.Ds - r.div_s * s.projection; // 1/(d-1) = 1
    return r;
}

Mat2 xi_matrix(const SegmentFrame& s, double z1, double z2) {
    Mat2 lambda_hat = Mat2::Zero();
    lambda_hat(0, 0) = 0.5 * (z1 + z2);
    const Mat2 mt = s.map.transpose();
    return mt.inverse() * lambda_hat * mt;
}

Eigen::VectorXd rho_star(const InterfacePolygon& poly, const SurfaceField& rho_gamma) {
    Eigen::VectorXd out(poly.num_segments());
    for (int j = 0; j < poly.num_segments(); ++j) {
        const double a = rho_gamma[poly.seg_vertex(j, 0)];
        const double b = rho_gamma[poly.seg_vertex(j, 1)];
        out[j] = (std::min(a, b) < 0.0) ? 0.0 : 0.5 * (a + b);
    }
    return out;
}

} // namespace bsflow
