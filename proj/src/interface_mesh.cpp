#include "bsflow/interface_mesh.hpp"

#include "bsflow/errors.hpp"

#include <cmath>

namespace bsflow {

InterfacePolygon::InterfacePolygon(std::vector<Vec2> vertices, long generation)
    : q_(std::move(vertices)), generation_(generation) {
    const int K = num_vertices();
    if (K < 3) throw GeometricError("interface polygon needs at least 3 vertices");
    length_.resize(K);
    tangent_.resize(K);
    normal_.resize(K);
    omega_.resize(K);
    arc_.resize(K);
    h_gamma_ = 0.0;
    min_edge_ = std::numeric_limits<double>::infinity();
    for (int j = 0; j < K; ++j) {
        const Vec2 e = q_[(j + 1) % K] - q_[j];
        length_[j] = e.norm();
        if (length_[j] == 0.0) throw GeometricError("zero-length interface segment");
        tangent_[j] = e / length_[j];
        normal_[j] = rot_minus90(tangent_[j]);
        h_gamma_ = std::max(h_gamma_, length_[j]);
        min_edge_ = std::min(min_edge_, length_[j]);
    }
    for (int k = 0; k < K; ++k) {
        const int jprev = (k + K - 1) % K;
        arc_[k] = length_[jprev] + length_[k];
        omega_[k] = (length_[jprev] * normal_[jprev] + length_[k] * normal_[k]) / arc_[k];
    }
}

double InterfacePolygon::total_length() const {
    double s = 0.0;
    for (double l : length_) s += l;
    return s;
}

double InterfacePolygon::enclosed_area() const { return polygon_signed_area(q_); }

void InterfacePolygon::require_valid() const {
    const int K = num_vertices();
    if (enclosed_area() <= 0.0)
        throw GeometricError("interface polygon lost its counterclockwise orientation");
    // self-intersection scan over non-adjacent segment pairs
    for (int i = 0; i < K; ++i) {
        for (int j = i + 2; j < K; ++j) {
            if (i == 0 && j == K - 1) continue;
            if (segments_intersect(q_[i], q_[(i + 1) % K], q_[j], q_[(j + 1) % K]))
                throw GeometricError("interface self-intersection detected");
        }
    }
}

bool InterfacePolygon::vertex_normals_span_full(double tol) const {
    Eigen::MatrixXd W(2, num_vertices());
    for (int k = 0; k < num_vertices(); ++k) W.col(k) = omega_[k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
    const auto& s = svd.singularValues();
    return s.size() == 2 && s(1) > tol * s(0);
}

InterfacePolygon make_circle(const Vec2& center, double radius, int k_gamma) {
    if (k_gamma < 3 || radius <= 0.0) throw GeometricError("make_circle: need K >= 3, R > 0");
    std::vector<Vec2> q(k_gamma);
    for (int k = 0; k < k_gamma; ++k) {
        const double phi = 2.0 * M_PI * k / k_gamma;
        q[k] = center + radius * Vec2(std::cos(phi), std::sin(phi));
    }
    return InterfacePolygon(std::move(q));
}

InterfacePolygon make_ellipse(const Vec2& center, double a, double b, int k_gamma) {
    if (k_gamma < 3 || a <= 0.0 || b <= 0.0) throw GeometricError("make_ellipse: bad arguments");
    std::vector<Vec2> q(k_gamma);
    for (int k = 0; k < k_gamma; ++k) {
        const double phi = 2.0 * M_PI * k / k_gamma;
        q[k] = center + Vec2(a * std::cos(phi), b * std::sin(phi));
    }
    return InterfacePolygon(std::move(q));
}

SurfaceField make_surface_field(const InterfacePolygon& poly, SurfaceRole role, double value) {
    SurfaceField f;
    f.values = Eigen::VectorXd::Constant(poly.num_vertices(), value);
    f.role = role;
    f.level = poly.generation();
    return f;
}

double lumped_inner_product(const InterfacePolygon& poly, const Eigen::VectorXd& eta,
                            const Eigen::VectorXd& zeta) {
    return lumped_inner_product(poly, [&](int j, int a) {
        const int k = poly.seg_vertex(j, a);
        return eta[k] * zeta[k];
    });
}

double integrate_p1(const InterfacePolygon& poly, const Eigen::VectorXd& eta) {
    double s = 0.0;
    for (int j = 0; j < poly.num_segments(); ++j)
        s += 0.5 * poly.seg_length(j) * (eta[poly.seg_vertex(j, 0)] + eta[poly.seg_vertex(j, 1)]);
    return s;
}

} // namespace bsflow
