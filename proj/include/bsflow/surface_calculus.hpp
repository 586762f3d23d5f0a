#pragma once

#include "bsflow/interface_mesh.hpp"

namespace bsflow {

/// Per-segment frame: tangent, normal, tangential projection and the map
/// matrix whose columns are the edge vector and the unit normal.
struct SegmentFrame {
    Vec2 t = Vec2::UnitX();
    Vec2 nu = -Vec2::UnitY();
    double length = 0.0;
    Mat2 projection = Mat2::Identity(); // Id - nu (x) nu, rank 1 for d=2
    Mat2 map = Mat2::Identity();        // M_sigma = [Q2-Q1 | nu]

    SegmentFrame() = default;
    SegmentFrame(const Vec2& q1, const Vec2& q2);
};

SegmentFrame segment_frame(const InterfacePolygon& poly, int j);

/// Surface gradient of a P1 scalar with endpoint values (f1,f2):
/// ((f2-f1)/L) t, tangential by construction.
Vec2 surface_gradient(const SegmentFrame& s, double f1, double f2);

/// Gradients of the two segment hat functions, G_a = grad_s chi_a.
std::array<Vec2, 2> hat_gradients(const SegmentFrame& s);

/// Full 2x2 surface gradient of a P1 vector field with endpoint values u1,u2.
Mat2 surface_gradient(const SegmentFrame& s, const Vec2& u1, const Vec2& u2);

struct RateOfDeformation {
    Mat2 Ds = Mat2::Zero();     // projected symmetric part
    double div_s = 0.0;         // surface divergence
    Mat2 Ds_dev = Mat2::Zero(); // deviatoric part, identically 0 for d=2
};

RateOfDeformation rate_of_deformation(const SegmentFrame& s, const Vec2& u1, const Vec2& u2);

/// The matrix Xi with Xi * grad_s z = (1/2) grad_s pi[z^2] for P1 z.
Mat2 xi_matrix(const SegmentFrame& s, double z1, double z2);

/// Per-segment value: mean of the P1 density when nonnegative on the closed
/// segment, 0 as soon as the minimum over the segment is negative.
Eigen::VectorXd rho_star(const InterfacePolygon& poly, const SurfaceField& rho_gamma);

} // namespace bsflow
