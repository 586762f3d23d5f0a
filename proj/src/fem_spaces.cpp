#include "bsflow/fem_spaces.hpp"

#include "bsflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace bsflow {

namespace {

long long pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
}

std::array<Vec2, 3> lambda_gradients(const BulkMesh& mesh, int t) {
    const Vec2 a = mesh.tri_vertex(t, 0), b = mesh.tri_vertex(t, 1), c = mesh.tri_vertex(t, 2);
    const double den = orient2d(a, b, c);
    auto rot90 = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
    return {rot90(c - b) / den, rot90(a - c) / den, rot90(b - a) / den};
}

} // namespace

P2Space::P2Space(const BulkMesh& mesh) : mesh_(&mesh) {
    const int V = mesh.num_vertices();
    nodes_.reserve(V * 2);
    for (int i = 0; i < V; ++i) nodes_.push_back(mesh.vertex(i));
    std::unordered_map<long long, int> edge_node;
    edge_node.reserve(mesh.num_triangles() * 2);
    tri_nodes_.resize(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& v = mesh.tri(t);
        for (int a = 0; a < 3; ++a) tri_nodes_[t][a] = v[a];
        // local midpoint order: edge (1,2), (2,0), (0,1)
        const std::array<std::pair<int, int>, 3> edges{
            std::make_pair(v[1], v[2]), std::make_pair(v[2], v[0]), std::make_pair(v[0], v[1])};
        for (int e = 0; e < 3; ++e) {
            const long long key = pair_key(edges[e].first, edges[e].second);
            auto it = edge_node.find(key);
            int n;
            if (it == edge_node.end()) {
                n = static_cast<int>(nodes_.size());
                nodes_.push_back(0.5 * (mesh.vertex(edges[e].first) + mesh.vertex(edges[e].second)));
                edge_node.emplace(key, n);
            } else {
                n = it->second;
            }
            tri_nodes_[t][3 + e] = n;
        }
    }
    node_bc_.assign(nodes_.size(), 0);
    node_dir_.assign(nodes_.size(), 0);
    for (const auto& be : mesh.boundary_edges()) {
        const long long key = pair_key(be.a, be.b);
        const int mid = edge_node.at(key);
        unsigned char mask;
        if (be.tag == BoundaryTag::Dirichlet) {
            mask = 3;
            node_dir_[be.a] = node_dir_[be.b] = node_dir_[mid] = 1;
        } else {
            // free-slip on an axis-aligned side: constrain the normal component
            const Vec2 e = mesh.vertex(be.b) - mesh.vertex(be.a);
            mask = std::abs(e.x()) < std::abs(e.y()) ? 1 : 2;
        }
        node_bc_[be.a] |= mask;
        node_bc_[be.b] |= mask;
        node_bc_[mid] |= mask;
    }
}

P2Shape P2Space::shape(int t, const Eigen::Vector3d& l) const {
    P2Shape s;
    const auto g = lambda_gradients(*mesh_, t);
    for (int i = 0; i < 3; ++i) {
        s.value[i] = l[i] * (2.0 * l[i] - 1.0);
        s.grad[i] = (4.0 * l[i] - 1.0) * g[i];
    }
    // midpoints of edges (1,2), (2,0), (0,1)
    const std::array<std::pair<int, int>, 3> e{{{1, 2}, {2, 0}, {0, 1}}};
    for (int i = 0; i < 3; ++i) {
        const auto [p, q] = e[i];
        s.value[3 + i] = 4.0 * l[p] * l[q];
        s.grad[3 + i] = 4.0 * (l[p] * g[q] + l[q] * g[p]);
    }
    return s;
}

Vec2 P2Space::evaluate(const Eigen::VectorXd& coef, int t, const Eigen::Vector3d& l) const {
    const P2Shape s = shape(t, l);
    Vec2 u = Vec2::Zero();
    for (int i = 0; i < 6; ++i) {
        const int n = tri_nodes_[t][i];
        u.x() += s.value[i] * coef[2 * n];
        u.y() += s.value[i] * coef[2 * n + 1];
    }
    return u;
}

Vec2 P2Space::evaluate(const Eigen::VectorXd& coef, const Vec2& p, int hint) const {
    const auto loc = hint >= 0 ? mesh_->locate(p, hint) : mesh_->locate(p);
    return evaluate(coef, loc.tri, loc.lambda);
}

Mat2 P2Space::evaluate_gradient(const Eigen::VectorXd& coef, int t,
                                const Eigen::Vector3d& l) const {
    const P2Shape s = shape(t, l);
    Mat2 g = Mat2::Zero();
    for (int i = 0; i < 6; ++i) {
        const int n = tri_nodes_[t][i];
        g.row(0) += coef[2 * n] * s.grad[i].transpose();
        g.row(1) += coef[2 * n + 1] * s.grad[i].transpose();
    }
    return g;
}

Eigen::VectorXd P2Space::interpolate(const std::function<Vec2(const Vec2&)>& field) const {
    Eigen::VectorXd out(num_dofs());
    for (int n = 0; n < num_nodes(); ++n) {
        const Vec2 v = field(nodes_[n]);
        out[2 * n] = v.x();
        out[2 * n + 1] = v.y();
    }
    return out;
}

Eigen::VectorXd P2Space::interpolate_from(const P2Space& from, const Eigen::VectorXd& coef) const {
    Eigen::VectorXd out(num_dofs());
    int hint = 0;
    for (int n = 0; n < num_nodes(); ++n) {
        const auto loc = from.mesh().locate(nodes_[n], hint);
        hint = loc.tri;
        const Vec2 v = from.evaluate(coef, loc.tri, loc.lambda);
        out[2 * n] = v.x();
        out[2 * n + 1] = v.y();
    }
    return out;
}

PressureSpace::PressureSpace(const BulkMesh& mesh, PressureKind kind, bool xfem,
                             const ElementClassification* cls, const InterfacePolygon* interface)
    : mesh_(&mesh), kind_(kind), xfem_(xfem) {
    const int V = mesh.num_vertices();
    const int T = mesh.num_triangles();
    const bool has_p1 = kind != PressureKind::P0;
    const bool has_p0 = kind != PressureKind::P1;
    p0_offset_ = has_p1 ? V : 0;
    n_dofs_ = (has_p1 ? V : 0) + (has_p0 ? T : 0);
    if (xfem_) {
        if (!cls || !interface)
            throw ConfigError("XFEM pressure enrichment needs a classification and interface");
        labels_ = cls->label;
        interface_copy_ = interface->vertices();
        vol_minus_ = bsflow::inner_phase_volume(mesh, *cls, interface_copy_);
        n_dofs_ += 1;
    }
    weights_ = Eigen::VectorXd::Zero(n_dofs_);
    for (int t = 0; t < T; ++t) {
        const double A = mesh.tri_area(t);
        if (has_p1)
            for (int a = 0; a < 3; ++a) weights_[mesh.tri(t)[a]] += A / 3.0;
        if (has_p0) weights_[p0_offset_ + t] = A;
    }
    if (xfem_) weights_[n_dofs_ - 1] = vol_minus_;
    if (has_p1) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_dofs_);
        v.segment(0, V).setOnes();
        nullspace_.push_back(std::move(v));
    }
    if (has_p0) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_dofs_);
        v.segment(p0_offset_, T).setOnes();
        nullspace_.push_back(std::move(v));
    }
}

int PressureSpace::tri_dof_count() const {
    switch (kind_) {
    case PressureKind::P1: return 3;
    case PressureKind::P0: return 1;
    case PressureKind::P1P0: return 4;
    }
    return 0;
}

int PressureSpace::tri_dof(int t, int i) const {
    if (kind_ != PressureKind::P0 && i < 3) return mesh_->tri(t)[i];
    return p0_offset_ + t;
}

double PressureSpace::tri_dof_value(int t, int i, const Eigen::Vector3d& l) const {
    (void)t;
    if (kind_ != PressureKind::P0 && i < 3) return l[i];
    return 1.0;
}

double PressureSpace::chi_minus(int t, const Eigen::Vector3d& l) const {
    if (!xfem_) return 0.0;
    switch (labels_[t]) {
    case ElementLabel::Interior: return 1.0;
    case ElementLabel::Exterior: return 0.0;
    case ElementLabel::Interfacial: {
        const Vec2 p = l[0] * mesh_->tri_vertex(t, 0) + l[1] * mesh_->tri_vertex(t, 1) +
                       l[2] * mesh_->tri_vertex(t, 2);
        return point_in_polygon(p, interface_copy_) ? 1.0 : 0.0;
    }
    }
    return 0.0;
}

double PressureSpace::evaluate(const Eigen::VectorXd& coef, int t,
                               const Eigen::Vector3d& l) const {
    double p = 0.0;
    for (int i = 0; i < tri_dof_count(); ++i) p += coef[tri_dof(t, i)] * tri_dof_value(t, i, l);
    if (xfem_) p += coef[n_dofs_ - 1] * chi_minus(t, l);
    return p;
}

std::vector<Vec2> clip_inner_phase_to_triangle(const BulkMesh& mesh, int t,
                                               const std::vector<Vec2>& polygon) {
    const std::vector<Vec2> tri{mesh.tri_vertex(t, 0), mesh.tri_vertex(t, 1),
                                mesh.tri_vertex(t, 2)};
    auto clipped = clip_polygon_convex(polygon, tri);
    if (clipped.size() >= 3 && std::abs(polygon_signed_area(clipped)) > 1e-14) return clipped;
    return {};
}

double inner_phase_volume(const BulkMesh& mesh, const ElementClassification& cls,
                          const std::vector<Vec2>& polygon) {
    double vol = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (cls.label[t] == ElementLabel::Interior) {
            vol += mesh.tri_area(t);
        } else if (cls.label[t] == ElementLabel::Interfacial) {
            const auto region = clip_inner_phase_to_triangle(mesh, t, polygon);
            if (!region.empty()) vol += polygon_signed_area(region);
        }
    }
    return vol;
}

std::vector<SegPiece> trace_segment(const BulkMesh& mesh, const Vec2& a, const Vec2& b) {
    std::vector<SegPiece> pieces;
    const Vec2 lo = a.cwiseMin(b), hi = a.cwiseMax(b);
    for (int t : mesh.grid().query(lo, hi)) {
        // restrict {s : lambda_i(a + s (b-a)) >= 0 for all i} to [0,1]
        const Eigen::Vector3d la = mesh.barycentric(t, a);
        const Eigen::Vector3d lb = mesh.barycentric(t, b);
        double s0 = 0.0, s1 = 1.0;
        for (int i = 0; i < 3; ++i) {
            const double va = la[i], vb = lb[i];
            const double dv = vb - va;
            if (std::abs(dv) < 1e-15) {
                if (va < -1e-13) {
                    s0 = 1.0;
                    s1 = 0.0;
                    break;
                }
            } else if (dv > 0.0) {
                s0 = std::max(s0, -va / dv);
            } else {
                s1 = std::min(s1, -va / dv);
            }
        }
        if (s1 - s0 > 1e-12) pieces.push_back({s0, s1, t});
    }
    std::sort(pieces.begin(), pieces.end(), [](const SegPiece& x, const SegPiece& y) {
        return x.t0 != y.t0 ? x.t0 < y.t0 : x.tri < y.tri;
    });
    // resolve overlaps (segment running along a shared mesh edge) to lower ids
    std::vector<SegPiece> out;
    double covered = 0.0;
    for (const auto& p : pieces) {
        const double t0 = std::max(p.t0, covered);
        if (p.t1 - t0 > 1e-12) {
            out.push_back({t0, p.t1, p.tri});
            covered = p.t1;
        }
    }
    return out;
}

Eigen::VectorXd xfem_volume_column(const P2Space& vel, const ElementClassification& cls,
                                   const InterfacePolygon& interface, XfemRoute route) {
    const BulkMesh& mesh = vel.mesh();
    Eigen::VectorXd col = Eigen::VectorXd::Zero(vel.num_dofs());
    if (route == XfemRoute::Clipping) {
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            double A, Ix, Iy;
            if (cls.label[t] == ElementLabel::Interior) {
                const std::vector<Vec2> tri{mesh.tri_vertex(t, 0), mesh.tri_vertex(t, 1),
                                            mesh.tri_vertex(t, 2)};
                polygon_moments(tri, A, Ix, Iy);
            } else if (cls.label[t] == ElementLabel::Interfacial) {
                const auto region = clip_inner_phase_to_triangle(mesh, t, interface.vertices());
                if (region.empty()) continue;
                polygon_moments(region, A, Ix, Iy);
            } else {
                continue;
            }
            // gradients of P2 basis functions are linear; integrate them from
            // their vertex values against the affine moments
            std::array<std::array<Vec2, 6>, 3> gv; // gradient of basis i at vertex a
            for (int aIdx = 0; aIdx < 3; ++aIdx) {
                Eigen::Vector3d l = Eigen::Vector3d::Zero();
                l[aIdx] = 1.0;
                const P2Shape s = vel.shape(t, l);
                for (int i = 0; i < 6; ++i) gv[aIdx][i] = s.grad[i];
            }
            // lambda_a is affine: lambda_a(x,y) = (q1 x q2 + x (q1y - q2y) + y (q2x - q1x))/den,
            // so its integral over the region follows from (A, Ix, Iy)
            const double den = orient2d(mesh.tri_vertex(t, 0), mesh.tri_vertex(t, 1),
                                        mesh.tri_vertex(t, 2));
            Eigen::Vector3d lam_integral;
            for (int aIdx = 0; aIdx < 3; ++aIdx) {
                const Vec2 q1 = mesh.tri_vertex(t, (aIdx + 1) % 3);
                const Vec2 q2 = mesh.tri_vertex(t, (aIdx + 2) % 3);
                const double c0 = cross2(q1, q2);
                const double cx = q1.y() - q2.y();
                const double cy = q2.x() - q1.x();
                lam_integral[aIdx] = (c0 * A + cx * Ix + cy * Iy) / den;
            }
            for (int i = 0; i < 6; ++i) {
                Vec2 gint = Vec2::Zero();
                for (int aIdx = 0; aIdx < 3; ++aIdx) gint += lam_integral[aIdx] * gv[aIdx][i];
                const int n = vel.tri_nodes(t)[i];
                col[2 * n] += gint.x();
                col[2 * n + 1] += gint.y();
            }
        }
    } else {
        const auto& gauss = gauss_segment(2);
        for (int j = 0; j < interface.num_segments(); ++j) {
            const Vec2 a = interface.vertex(interface.seg_vertex(j, 0));
            const Vec2 b = interface.vertex(interface.seg_vertex(j, 1));
            const Vec2 nu = interface.seg_normal(j);
            const double L = interface.seg_length(j);
            for (const auto& piece : trace_segment(mesh, a, b)) {
                const double plen = (piece.t1 - piece.t0) * L;
                for (size_t g = 0; g < gauss.points.size(); ++g) {
                    const double s = piece.t0 + gauss.points[g] * (piece.t1 - piece.t0);
                    const Vec2 p = a + s * (b - a);
                    const Eigen::Vector3d l = mesh.barycentric(piece.tri, p);
                    const P2Shape sh = vel.shape(piece.tri, l);
                    const double w = gauss.weights[g] * plen;
                    for (int i = 0; i < 6; ++i) {
                        const int n = vel.tri_nodes(piece.tri)[i];
                        col[2 * n] += w * sh.value[i] * nu.x();
                        col[2 * n + 1] += w * sh.value[i] * nu.y();
                    }
                }
            }
        }
    }
    return col;
}

} // namespace bsflow
