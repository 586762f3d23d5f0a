#pragma once

#include "bsflow/bulk_mesh.hpp"

#include <array>
#include <functional>
#include <vector>

namespace bsflow {

/// Values and gradients of the six P2 shape functions at a barycentric point.
struct P2Shape {
    std::array<double, 6> value;
    std::array<Vec2, 6> grad;
};

/// Piecewise quadratic vector space on the bulk mesh (velocity). Scalar nodes
/// are the mesh vertices followed by the edge midpoints; the velocity DOF of
/// node n, component c is 2n + c.
class P2Space {
public:
    explicit P2Space(const BulkMesh& mesh);

    const BulkMesh& mesh() const { return *mesh_; }
    long mesh_generation() const { return mesh_->generation(); }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_dofs() const { return 2 * num_nodes(); }
    const Vec2& node(int n) const { return nodes_[n]; }
    const std::array<int, 6>& tri_nodes(int t) const { return tri_nodes_[t]; }

    /// Bitmask per node: bit0 fixes the x component, bit1 the y component.
    unsigned char node_bc(int n) const { return node_bc_[n]; }
    /// True when the node touches the Dirichlet boundary part (its
    /// constrained components carry boundary data rather than zero).
    bool node_dirichlet(int n) const { return node_dir_[n] != 0; }

    P2Shape shape(int t, const Eigen::Vector3d& lambda) const;

    Vec2 evaluate(const Eigen::VectorXd& coef, int t, const Eigen::Vector3d& lambda) const;
    Vec2 evaluate(const Eigen::VectorXd& coef, const Vec2& p, int hint = -1) const;
    /// Gradient matrix (d u_i / d x_j) of the coefficient field.
    Mat2 evaluate_gradient(const Eigen::VectorXd& coef, int t,
                           const Eigen::Vector3d& lambda) const;

    /// Nodal interpolant of an analytic field.
    Eigen::VectorXd interpolate(const std::function<Vec2(const Vec2&)>& field) const;
    /// Nodal interpolant of a coefficient field living on another mesh.
    Eigen::VectorXd interpolate_from(const P2Space& from, const Eigen::VectorXd& coef) const;

private:
    const BulkMesh* mesh_;
    std::vector<Vec2> nodes_;
    std::vector<std::array<int, 6>> tri_nodes_;
    std::vector<unsigned char> node_bc_;
    std::vector<unsigned char> node_dir_;
};

enum class PressureKind { P1, P0, P1P0 };

/// Pressure space, optionally augmented by the characteristic function of the
/// inner phase (one extra DOF appended at the end).
class PressureSpace {
public:
    PressureSpace(const BulkMesh& mesh, PressureKind kind, bool xfem,
                  const ElementClassification* cls, const InterfacePolygon* interface);

    const BulkMesh& mesh() const { return *mesh_; }
    PressureKind kind() const { return kind_; }
    bool has_xfem() const { return xfem_; }
    int num_dofs() const { return n_dofs_; }
    int xfem_dof() const { return xfem_ ? n_dofs_ - 1 : -1; }
    int p1_offset() const { return 0; }
    int p0_offset() const { return p0_offset_; }

    /// Per-triangle polynomial DOFs (without the enrichment).
    int tri_dof_count() const;
    int tri_dof(int t, int i) const;
    double tri_dof_value(int t, int i, const Eigen::Vector3d& lambda) const;

    /// Integral of each basis function over Omega (enrichment: vol(Omega_-)).
    const Eigen::VectorXd& mass_weights() const { return weights_; }
    /// Coefficient-space directions spanning the constant pressure nullspace.
    const std::vector<Eigen::VectorXd>& nullspace() const { return nullspace_; }

    double inner_phase_volume() const { return vol_minus_; }
    /// Characteristic function value of the inner phase on triangle t at
    /// barycentric point lambda (0 or 1; cut cells decided pointwise).
    double chi_minus(int t, const Eigen::Vector3d& lambda) const;

    /// Evaluate a pressure coefficient vector (including enrichment).
    double evaluate(const Eigen::VectorXd& coef, int t, const Eigen::Vector3d& lambda) const;

private:
    const BulkMesh* mesh_;
    PressureKind kind_;
    bool xfem_;
    int n_dofs_ = 0, p0_offset_ = 0;
    Eigen::VectorXd weights_;
    std::vector<Eigen::VectorXd> nullspace_;
    double vol_minus_ = 0.0;
    std::vector<ElementLabel> labels_; // copied so snapshots stay valid
    std::vector<Vec2> interface_copy_;
};

/// Portion of the interface polygon inside triangle t (clipped, CCW);
/// empty away from the cut.
std::vector<Vec2> clip_inner_phase_to_triangle(const BulkMesh& mesh, int t,
                                               const std::vector<Vec2>& polygon);

/// Exact area of the inner phase seen by the mesh: full interior triangles
/// plus polygon-clipped interfacial ones.
double inner_phase_volume(const BulkMesh& mesh, const ElementClassification& cls,
                          const std::vector<Vec2>& polygon);

struct SegPiece {
    double t0, t1; // parameter interval on [0,1]
    int tri;
};

/// Decompose segment [a,b] into pieces each contained in one bulk triangle.
/// Overlapping claims (segment on a mesh edge) resolve to the lower id.
std::vector<SegPiece> trace_segment(const BulkMesh& mesh, const Vec2& a, const Vec2& b);

enum class XfemRoute { Clipping, BoundaryFlux };

/// Column (div phi_i, chi_{Omega_-}) over all velocity DOFs, by exact cut-cell
/// integration or equivalently by the divergence theorem over the polygon.
Eigen::VectorXd xfem_volume_column(const P2Space& velocity, const ElementClassification& cls,
                                   const InterfacePolygon& interface,
                                   XfemRoute route = XfemRoute::Clipping);

} // namespace bsflow
