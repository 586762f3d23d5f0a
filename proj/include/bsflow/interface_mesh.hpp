#pragma once

#include "bsflow/geometry.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bsflow {

/// Closed polygonal interface, vertices ordered counterclockwise so that the
/// per-segment unit normal points into the outer phase. Segment j connects
/// vertex j with vertex j+1 (mod K).
class InterfacePolygon {
public:
    InterfacePolygon() = default;
    explicit InterfacePolygon(std::vector<Vec2> vertices, long generation = 0);

    int num_vertices() const { return static_cast<int>(q_.size()); }
    int num_segments() const { return static_cast<int>(q_.size()); }
    const std::vector<Vec2>& vertices() const { return q_; }
    const Vec2& vertex(int k) const { return q_[k]; }
    long generation() const { return generation_; }

    int seg_vertex(int j, int a) const { return a == 0 ? j : (j + 1) % num_vertices(); }
    double seg_length(int j) const { return length_[j]; }
    const Vec2& seg_tangent(int j) const { return tangent_[j]; }
    const Vec2& seg_normal(int j) const { return normal_[j]; } // outward, into Omega_+

    /// Vertex normal omega_k: length-weighted average of the two adjacent
    /// segment normals, normalized by the adjacent-arc length.
    const Vec2& vertex_normal(int k) const { return omega_[k]; }
    /// H^1 measure of the two segments meeting at vertex k.
    double vertex_arc(int k) const { return arc_[k]; }
    /// Diagonal entry of the lumped mass matrix: vertex_arc(k)/2.
    double lumped_mass(int k) const { return 0.5 * arc_[k]; }

    double h_gamma() const { return h_gamma_; }
    double min_edge() const { return min_edge_; }
    double total_length() const;
    double enclosed_area() const;

    /// max edge / min edge; 1 for a perfectly equidistributed polygon.
    double edge_ratio() const { return h_gamma_ / min_edge_; }

    /// Throws GeometricError on zero-length segments or self-intersection.
    void require_valid() const;

    /// True iff the span of the vertex normals has full dimension
    /// (two singular values above tol * largest).
    bool vertex_normals_span_full(double tol = 1e-10) const;

private:
    std::vector<Vec2> q_;
    std::vector<double> length_;
    std::vector<Vec2> tangent_, normal_, omega_;
    std::vector<double> arc_;
    double h_gamma_ = 0.0, min_edge_ = 0.0;
    long generation_ = 0;
};

InterfacePolygon make_circle(const Vec2& center, double radius, int k_gamma);
InterfacePolygon make_ellipse(const Vec2& center, double a, double b, int k_gamma);

enum class SurfaceRole { Density, Surfactant, Curvature, Position };

/// Nodal values on the interface vertices of one time level. The vertex
/// connectivity is shared across time levels, so the pushforward/pullback
/// re-indexing maps act as the identity on the coefficient vector.
struct SurfaceField {
    Eigen::VectorXd values;
    SurfaceRole role = SurfaceRole::Density;
    long level = 0;

    double operator[](int k) const { return values[k]; }
    double& operator[](int k) { return values[k]; }
    int size() const { return static_cast<int>(values.size()); }
};

SurfaceField make_surface_field(const InterfacePolygon& poly, SurfaceRole role, double value = 0.0);

/// Mass lumped inner product <eta,zeta>^h: eval(j,a) must return the product
/// (eta*zeta) one-sidedly at endpoint a of segment j.
template <typename F>
double lumped_inner_product(const InterfacePolygon& poly, F&& eval) {
    double s = 0.0;
    for (int j = 0; j < poly.num_segments(); ++j)
        s += 0.5 * poly.seg_length(j) * (eval(j, 0) + eval(j, 1));
    return s;
}

/// <eta,zeta>^h for two piecewise linear nodal fields.
double lumped_inner_product(const InterfacePolygon& poly, const Eigen::VectorXd& eta,
                            const Eigen::VectorXd& zeta);

/// Exact trapezoid integral of a piecewise linear nodal field over the polygon.
double integrate_p1(const InterfacePolygon& poly, const Eigen::VectorXd& eta);

} // namespace bsflow
