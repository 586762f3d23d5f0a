#include "bsflow/bulk_mesh.hpp"

#include "bsflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bsflow {

namespace {

long long edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
}

double seg_seg_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                    std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

} // namespace

double Domain::area() const {
    double a = (hi.x() - lo.x()) * (hi.y() - lo.y());
    if (has_hole) a -= (hole_hi.x() - hole_lo.x()) * (hole_hi.y() - hole_lo.y());
    return a;
}

BoundaryTag Domain::boundary_tag(const Vec2& m) const {
    if (!sides_free_slip) return BoundaryTag::Dirichlet;
    const double tol = 1e-9 * min_extent();
    if (std::abs(m.x() - lo.x()) < tol || std::abs(m.x() - hi.x()) < tol)
        return BoundaryTag::FreeSlip;
    return BoundaryTag::Dirichlet;
}

TriangleGrid::TriangleGrid(const Vec2& lo, const Vec2& hi, int nx, int ny)
    : lo_(lo), nx_(nx), ny_(ny), bins_(static_cast<size_t>(nx) * ny) {
    cell_ = Vec2((hi.x() - lo.x()) / nx, (hi.y() - lo.y()) / ny);
}

void TriangleGrid::insert(int id, const Vec2& bb_lo, const Vec2& bb_hi) {
    const int i0 = std::clamp(static_cast<int>((bb_lo.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((bb_hi.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((bb_lo.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((bb_hi.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) bins_[static_cast<size_t>(j) * nx_ + i].push_back(id);
}

std::vector<int> TriangleGrid::query(const Vec2& bb_lo, const Vec2& bb_hi) const {
    std::vector<int> out;
    if (bins_.empty()) return out;
    const int i0 = std::clamp(static_cast<int>((bb_lo.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((bb_hi.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((bb_lo.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((bb_hi.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
            const auto& b = bins_[static_cast<size_t>(j) * nx_ + i];
            out.insert(out.end(), b.begin(), b.end());
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double BulkMesh::tri_diameter(int t) const {
    const Vec2 a = tri_vertex(t, 0), b = tri_vertex(t, 1), c = tri_vertex(t, 2);
    return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

Vec2 BulkMesh::barycenter(int t) const {
    return (tri_vertex(t, 0) + tri_vertex(t, 1) + tri_vertex(t, 2)) / 3.0;
}

Eigen::Vector3d BulkMesh::barycentric(int t, const Vec2& p) const {
    const Vec2 a = tri_vertex(t, 0), b = tri_vertex(t, 1), c = tri_vertex(t, 2);
    const double den = orient2d(a, b, c);
    Eigen::Vector3d l;
    l[0] = orient2d(p, b, c) / den;
    l[1] = orient2d(a, p, c) / den;
    l[2] = orient2d(a, b, p) / den;
    return l;
}

bool BulkMesh::contains(int t, const Vec2& p, double tol) const {
    const Eigen::Vector3d l = barycentric(t, p);
    return l.minCoeff() >= -tol;
}

BulkMesh::Location BulkMesh::locate(const Vec2& p) const {
    const auto cand = grid_.query(p, p);
    for (int t : cand) {
        if (contains(t, p)) return {t, barycentric(t, p)};
    }
    // grid miss (tolerance straddling a bin): deterministic full scan
    for (int t = 0; t < num_triangles(); ++t)
        if (contains(t, p)) return {t, barycentric(t, p)};
    throw GeometricError("point outside the bulk mesh");
}

BulkMesh::Location BulkMesh::locate(const Vec2& p, int hint) const {
    if (hint < 0 || hint >= num_triangles()) return locate(p);
    int t = hint;
    for (int step = 0; step < 256; ++step) {
        const Eigen::Vector3d l = barycentric(t, p);
        int worst = 0;
        if (l[1] < l[worst]) worst = 1;
        if (l[2] < l[worst]) worst = 2;
        if (l[worst] >= -1e-12) {
            if (l.minCoeff() <= 1e-12) return locate(p); // on an edge: deterministic pick
            return {t, l};
        }
        // the edge opposite vertex `worst` is (worst+1, worst+2) = local edge worst+1
        const int next = neighbor_[t][(worst + 1) % 3];
        if (next < 0) break;
        t = next;
    }
    return locate(p);
}

void BulkMesh::bisect(int t, std::unordered_map<long long, int>& midpoint) {
    const int v0 = tris_[t].v[0], v1 = tris_[t].v[1], v2 = tris_[t].v[2];
    const long long key = edge_key(v0, v1);
    auto it = midpoint.find(key);
    int m;
    if (it == midpoint.end()) {
        m = num_vertices();
        verts_.push_back(0.5 * (verts_[v0] + verts_[v1]));
        midpoint.emplace(key, m);
    } else {
        m = it->second;
    }
    tris_[t].v = {v2, v0, m};
    tris_.push_back(Tri{{v1, v2, m}});
}

bool BulkMesh::refine_pass(const std::vector<char>& size_mark,
                           std::unordered_map<long long, int>& midpoint) {
    bool changed = false;
    const int n = num_triangles();
    for (int t = 0; t < n; ++t) {
        const auto& v = tris_[t].v;
        const bool hanging = midpoint.count(edge_key(v[0], v[1])) ||
                             midpoint.count(edge_key(v[1], v[2])) ||
                             midpoint.count(edge_key(v[2], v[0]));
        const bool marked = t < static_cast<int>(size_mark.size()) && size_mark[t];
        if (hanging || marked) {
            bisect(t, midpoint);
            changed = true;
        }
    }
    return changed;
}

void BulkMesh::finalize() {
    area_.resize(tris_.size());
    neighbor_.assign(tris_.size(), {-1, -1, -1});
    std::unordered_map<long long, std::pair<int, int>> first; // edge -> (tri, local edge)
    first.reserve(tris_.size() * 2);
    boundary_.clear();
    for (int t = 0; t < num_triangles(); ++t) {
        area_[t] = 0.5 * orient2d(tri_vertex(t, 0), tri_vertex(t, 1), tri_vertex(t, 2));
        if (area_[t] <= 0.0) throw GeometricError("non-positive triangle area");
        for (int e = 0; e < 3; ++e) {
            const int a = tris_[t].v[e], b = tris_[t].v[(e + 1) % 3];
            const long long key = edge_key(a, b);
            auto it = first.find(key);
            if (it == first.end()) {
                first.emplace(key, std::make_pair(t, e));
            } else {
                neighbor_[t][e] = it->second.first;
                neighbor_[it->second.first][it->second.second] = t;
                first.erase(it);
            }
        }
    }
    for (const auto& [key, te] : first) {
        const auto [t, e] = te;
        const int a = tris_[t].v[e], b = tris_[t].v[(e + 1) % 3];
        const Vec2 mid = 0.5 * (verts_[a] + verts_[b]);
        boundary_.push_back({t, e, a, b, domain_.boundary_tag(mid)});
    }
    std::sort(boundary_.begin(), boundary_.end(),
              [](const BoundaryEdge& x, const BoundaryEdge& y) {
                  return std::tie(x.tri, x.edge) < std::tie(y.tri, y.edge);
              });
    const int nb = std::max(4, static_cast<int>(std::sqrt(static_cast<double>(num_triangles()))));
    grid_ = TriangleGrid(domain_.lo, domain_.hi, nb, nb);
    for (int t = 0; t < num_triangles(); ++t) {
        Vec2 lo = tri_vertex(t, 0), hi = lo;
        for (int a = 1; a < 3; ++a) {
            lo = lo.cwiseMin(tri_vertex(t, a));
            hi = hi.cwiseMax(tri_vertex(t, a));
        }
        grid_.insert(t, lo, hi);
    }
}

BulkMesh build_uniform_mesh(const Domain& domain, int n) {
    if (n < 1) throw ConfigError("mesh subdivision must be >= 1");
    const double h = domain.min_extent() / n;
    const double wx = domain.hi.x() - domain.lo.x();
    const double wy = domain.hi.y() - domain.lo.y();
    const int nx = static_cast<int>(std::lround(wx / h));
    const int ny = static_cast<int>(std::lround(wy / h));
    if (std::abs(nx * h - wx) > 1e-9 * wx || std::abs(ny * h - wy) > 1e-9 * wy)
        throw ConfigError("domain extents are not commensurate with the mesh size");

    auto on_grid = [&](double v, double origin) {
        const double s = (v - origin) / h;
        return std::abs(s - std::lround(s)) < 1e-9;
    };
    if (domain.has_hole) {
        if (!on_grid(domain.hole_lo.x(), domain.lo.x()) || !on_grid(domain.hole_hi.x(), domain.lo.x()) ||
            !on_grid(domain.hole_lo.y(), domain.lo.y()) || !on_grid(domain.hole_hi.y(), domain.lo.y()))
            throw ConfigError("hole boundary is not resolved by the mesh");
    }
    auto in_hole = [&](const Vec2& c) {
        return domain.has_hole && c.x() > domain.hole_lo.x() && c.x() < domain.hole_hi.x() &&
               c.y() > domain.hole_lo.y() && c.y() < domain.hole_hi.y();
    };

    BulkMesh mesh;
    mesh.domain_ = domain;
    mesh.n_coarse_ = n;
    mesh.h_coarse_ = h;
    std::vector<int> vid(static_cast<size_t>(nx + 1) * (ny + 1), -1);
    auto vertex_id = [&](int i, int j) {
        int& id = vid[static_cast<size_t>(j) * (nx + 1) + i];
        if (id < 0) {
            id = mesh.num_vertices();
            mesh.verts_.emplace_back(domain.lo.x() + i * h, domain.lo.y() + j * h);
        }
        return id;
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec2 c(domain.lo.x() + (i + 0.5) * h, domain.lo.y() + (j + 0.5) * h);
            if (in_hole(c)) continue;
            const int p00 = vertex_id(i, j), p10 = vertex_id(i + 1, j);
            const int p01 = vertex_id(i, j + 1), p11 = vertex_id(i + 1, j + 1);
            // refinement edge = diagonal (p00,p11)
            mesh.tris_.push_back(BulkMesh::Tri{{p00, p11, p01}});
            mesh.tris_.push_back(BulkMesh::Tri{{p11, p00, p10}});
        }
    }
    mesh.finalize();
    return mesh;
}

BulkMesh adapt_mesh(const BulkMesh& mesh, const InterfacePolygon& interface, int n_fine,
                    int n_coarse) {
    if (n_fine < n_coarse || n_coarse < 1) throw ConfigError("need n_fine >= n_coarse >= 1");
    BulkMesh out = build_uniform_mesh(mesh.domain(), n_coarse);
    out.generation_ = mesh.generation() + 1;
    const double h_f = mesh.domain().min_extent() / n_fine;

    // bin the interface segments once
    TriangleGrid seg_grid(mesh.domain().lo, mesh.domain().hi,
                          std::max(4, n_coarse * 4), std::max(4, n_coarse * 4));
    for (int j = 0; j < interface.num_segments(); ++j) {
        const Vec2 a = interface.vertex(interface.seg_vertex(j, 0));
        const Vec2 b = interface.vertex(interface.seg_vertex(j, 1));
        seg_grid.insert(j, a.cwiseMin(b), a.cwiseMax(b));
    }
    auto near_interface = [&](int t) {
        Vec2 lo = out.tri_vertex(t, 0), hi = lo;
        for (int a = 1; a < 3; ++a) {
            lo = lo.cwiseMin(out.tri_vertex(t, a));
            hi = hi.cwiseMax(out.tri_vertex(t, a));
        }
        const Vec2 pad(h_f, h_f);
        for (int j : seg_grid.query(lo - pad, hi + pad)) {
            const Vec2 sa = interface.vertex(interface.seg_vertex(j, 0));
            const Vec2 sb = interface.vertex(interface.seg_vertex(j, 1));
            for (int e = 0; e < 3; ++e) {
                if (seg_seg_distance(out.tri_vertex(t, e), out.tri_vertex(t, (e + 1) % 3), sa,
                                     sb) <= h_f)
                    return true;
            }
            // segment fully inside the triangle
            if (out.contains(t, sa, 0.0)) return true;
        }
        return false;
    };

    std::unordered_map<long long, int> midpoint;
    const int max_passes = 200;
    for (int pass = 0; pass < max_passes; ++pass) {
        std::vector<char> mark(out.num_triangles(), 0);
        bool any = false;
        for (int t = 0; t < out.num_triangles(); ++t) {
            if (out.tri_diameter(t) > h_f && near_interface(t)) {
                mark[t] = 1;
                any = true;
            }
        }
        if (!out.refine_pass(mark, midpoint) && !any) {
            out.finalize();
            return out;
        }
        if (pass == max_passes - 1) throw GeometricError("mesh refinement failed to terminate");
    }
    out.finalize();
    return out;
}

ElementClassification classify_elements(const BulkMesh& mesh, const InterfacePolygon& interface) {
    interface.require_valid();
    ElementClassification cls;
    cls.mesh_generation = mesh.generation();
    cls.label.assign(mesh.num_triangles(), ElementLabel::Exterior);

    TriangleGrid seg_grid(mesh.domain().lo, mesh.domain().hi, 32, 32);
    for (int j = 0; j < interface.num_segments(); ++j) {
        const Vec2 a = interface.vertex(interface.seg_vertex(j, 0));
        const Vec2 b = interface.vertex(interface.seg_vertex(j, 1));
        seg_grid.insert(j, a.cwiseMin(b), a.cwiseMax(b));
    }
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        Vec2 lo = mesh.tri_vertex(t, 0), hi = lo;
        for (int a = 1; a < 3; ++a) {
            lo = lo.cwiseMin(mesh.tri_vertex(t, a));
            hi = hi.cwiseMax(mesh.tri_vertex(t, a));
        }
        bool cut = false;
        for (int j : seg_grid.query(lo, hi)) {
            const Vec2 sa = interface.vertex(interface.seg_vertex(j, 0));
            const Vec2 sb = interface.vertex(interface.seg_vertex(j, 1));
            if (mesh.contains(t, sa, 0.0) || mesh.contains(t, sb, 0.0)) {
                cut = true;
                break;
            }
            for (int e = 0; e < 3 && !cut; ++e)
                cut = segments_intersect(mesh.tri_vertex(t, e), mesh.tri_vertex(t, (e + 1) % 3),
                                         sa, sb);
            if (cut) break;
        }
        if (cut)
            cls.label[t] = ElementLabel::Interfacial;
        else
            cls.label[t] = point_in_polygon(mesh.barycenter(t), interface.vertices())
                               ? ElementLabel::Interior
                               : ElementLabel::Exterior;
    }
    return cls;
}

void piecewise_coefficients(const BulkMesh& mesh, const ElementClassification& cls,
                            const PhysicalParams& params, Eigen::VectorXd& rho,
                            Eigen::VectorXd& mu) {
    if (cls.mesh_generation != mesh.generation())
        throw GeometricError("classification is stale for this mesh generation");
    rho.resize(mesh.num_triangles());
    mu.resize(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        switch (cls.label[t]) {
        case ElementLabel::Interior:
            rho[t] = params.rho_minus;
            mu[t] = params.mu_minus;
            break;
        case ElementLabel::Exterior:
            rho[t] = params.rho_plus;
            mu[t] = params.mu_plus;
            break;
        case ElementLabel::Interfacial:
            rho[t] = 0.5 * (params.rho_minus + params.rho_plus);
            mu[t] = 0.5 * (params.mu_minus + params.mu_plus);
            break;
        }
    }
}

Eigen::VectorXd project_p0(const BulkMesh& from, const Eigen::VectorXd& values,
                           const BulkMesh& to) {
    // barycenters of the nine subtriangles of a 3-fold red refinement
    static const std::array<std::array<double, 2>, 9> pts = [] {
        std::array<std::array<double, 2>, 9> p{};
        int n = 0;
        for (int i = 0; i <= 2; ++i)
            for (int j = 0; i + j <= 2; ++j) p[n++] = {(3.0 * i + 1) / 9.0, (3.0 * j + 1) / 9.0};
        for (int i = 0; i <= 1; ++i)
            for (int j = 0; i + j <= 1; ++j) p[n++] = {(3.0 * i + 2) / 9.0, (3.0 * j + 2) / 9.0};
        return p;
    }();
    Eigen::VectorXd out(to.num_triangles());
    int hint = 0;
    for (int t = 0; t < to.num_triangles(); ++t) {
        const Vec2 a = to.tri_vertex(t, 0), b = to.tri_vertex(t, 1), c = to.tri_vertex(t, 2);
        double acc = 0.0;
        for (const auto& q : pts) {
            const Vec2 z = a + q[0] * (b - a) + q[1] * (c - a);
            const auto loc = from.locate(z, hint);
            hint = loc.tri;
            acc += values[loc.tri];
        }
        out[t] = acc / 9.0;
    }
    return out;
}

} // namespace bsflow
