#pragma once

#include "bsflow/geometry.hpp"
#include "bsflow/interface_mesh.hpp"
#include "bsflow/params.hpp"

#include <array>
#include <optional>
#include <unordered_map>
#include <vector>

namespace bsflow {

enum class BoundaryTag { Dirichlet, FreeSlip };

/// Axis-aligned rectangle, optionally with an axis-aligned rectangular hole.
struct Domain {
    Vec2 lo = Vec2(-1, -1);
    Vec2 hi = Vec2(1, 1);
    bool has_hole = false;
    Vec2 hole_lo = Vec2::Zero();
    Vec2 hole_hi = Vec2::Zero();
    /// When true the two vertical sides x = lo.x, hi.x carry the free-slip
    /// condition; everything else (incl. the hole boundary) is Dirichlet.
    bool sides_free_slip = false;

    double min_extent() const { return std::min(hi.x() - lo.x(), hi.y() - lo.y()); }
    double area() const;
    BoundaryTag boundary_tag(const Vec2& edge_midpoint) const;
};

enum class ElementLabel : unsigned char { Interior, Exterior, Interfacial };

struct ElementClassification {
    std::vector<ElementLabel> label;
    long mesh_generation = 0;
};

/// Uniform-bin spatial index over triangles (or any boxed items).
class TriangleGrid {
public:
    TriangleGrid() = default;
    TriangleGrid(const Vec2& lo, const Vec2& hi, int nx, int ny);
    void insert(int id, const Vec2& bb_lo, const Vec2& bb_hi);
    /// Item ids whose boxes may overlap the query box, sorted ascending.
    std::vector<int> query(const Vec2& bb_lo, const Vec2& bb_hi) const;

private:
    Vec2 lo_, cell_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> bins_;
};

/// Conforming triangulation with newest-vertex-bisection refinement. The
/// refinement edge of triangle t is (v[0], v[1]); triangles stay CCW.
class BulkMesh {
public:
    struct Tri {
        std::array<int, 3> v;
    };

    int num_vertices() const { return static_cast<int>(verts_.size()); }
    int num_triangles() const { return static_cast<int>(tris_.size()); }
    const Vec2& vertex(int i) const { return verts_[i]; }
    const std::array<int, 3>& tri(int t) const { return tris_[t].v; }
    Vec2 tri_vertex(int t, int a) const { return verts_[tris_[t].v[a]]; }
    double tri_area(int t) const { return area_[t]; }
    double tri_diameter(int t) const;
    Vec2 barycenter(int t) const;
    /// Neighbor across edge e = (v[e], v[(e+1)%3]), or -1 on the boundary.
    int neighbor(int t, int e) const { return neighbor_[t][e]; }

    const Domain& domain() const { return domain_; }
    long generation() const { return generation_; }
    int n_coarse() const { return n_coarse_; }
    double h_coarse() const { return h_coarse_; }

    struct BoundaryEdge {
        int tri, edge; // local edge index
        int a, b;      // vertex ids
        BoundaryTag tag;
    };
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

    /// Barycentric coordinates of p in triangle t (sums to 1).
    Eigen::Vector3d barycentric(int t, const Vec2& p) const;
    bool contains(int t, const Vec2& p, double tol = 1e-12) const;

    struct Location {
        int tri = -1;
        Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
    };
    /// Deterministic point location: lowest containing triangle id. Throws
    /// GeometricError when p lies outside the closure of the mesh.
    Location locate(const Vec2& p) const;
    /// Walk from a hint; falls back to the deterministic grid search.
    Location locate(const Vec2& p, int hint) const;

    const TriangleGrid& grid() const { return grid_; }

    friend BulkMesh build_uniform_mesh(const Domain& domain, int n);
    friend BulkMesh adapt_mesh(const BulkMesh& mesh, const InterfacePolygon& interface,
                               int n_fine, int n_coarse);

private:
    void bisect(int t, std::unordered_map<long long, int>& midpoint);
    bool refine_pass(const std::vector<char>& size_mark,
                     std::unordered_map<long long, int>& midpoint);
    void finalize();

    std::vector<Vec2> verts_;
    std::vector<Tri> tris_;
    std::vector<double> area_;
    std::vector<std::array<int, 3>> neighbor_;
    std::vector<BoundaryEdge> boundary_;
    TriangleGrid grid_;
    Domain domain_;
    long generation_ = 0;
    int n_coarse_ = 1;
    double h_coarse_ = 0.0;
};

/// Right-triangle subdivision (two per square cell) with cell size
/// h = min extent / n. The hole boundary must be grid-resolved.
BulkMesh build_uniform_mesh(const Domain& domain, int n);

/// Rebuild from the coarse base and bisect until every triangle within one
/// h_f of the interface has diameter <= h_f. Deterministic and idempotent
/// for a fixed interface.
BulkMesh adapt_mesh(const BulkMesh& mesh, const InterfacePolygon& interface, int n_fine,
                    int n_coarse);

ElementClassification classify_elements(const BulkMesh& mesh, const InterfacePolygon& interface);

/// Piecewise constant density/viscosity per the interior/exterior/interfacial
/// split; interfacial elements carry the arithmetic average.
void piecewise_coefficients(const BulkMesh& mesh, const ElementClassification& cls,
                            const PhysicalParams& params, Eigen::VectorXd& rho,
                            Eigen::VectorXd& mu);

/// Elementwise mean of a piecewise constant field from another mesh,
/// approximated by a 9-point barycentric subsample per target triangle.
Eigen::VectorXd project_p0(const BulkMesh& from, const Eigen::VectorXd& values,
                           const BulkMesh& to);

} // namespace bsflow
