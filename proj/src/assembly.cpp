#include "bsflow/assembly.hpp"

#include "bsflow/errors.hpp"

#include <cmath>

namespace bsflow {

namespace {

struct VertexEval {
    int tri = -1;
    std::array<int, 6> nodes{};
    std::array<double, 6> phi{};
};

VertexEval eval_basis_at(const P2Space& vel, const BulkMesh::Location& loc) {
    VertexEval ve;
    ve.tri = loc.tri;
    ve.nodes = vel.tri_nodes(loc.tri);
    ve.phi = vel.shape(loc.tri, loc.lambda).value;
    return ve;
}

Vec2 eval_p2(const P2Space& vel, const Eigen::VectorXd& coef, const BulkMesh::Location& loc) {
    return vel.evaluate(coef, loc.tri, loc.lambda);
}

} // namespace

void BlockSystem::init(Scheme s, int n_u, int n_p, int K) {
    scheme = s;
    layout.n_u = n_u;
    layout.n_p = n_p;
    layout.n_x = 2 * K;
    layout.n_k = (s == Scheme::GD) ? 2 * K : K;
    layout.rows_motion = (s == Scheme::GD) ? 2 * K : K;
    layout.rows_curv = 2 * K;
    rhs = Eigen::VectorXd::Zero(layout.total());
    triplets.clear();
    convection.clear();
    constraints.clear();
    nullspace.clear();
    mean_weights.clear();
}

void StepInputs::cache_locations() {
    loc_gamma.clear();
    loc_gamma_prev.clear();
    int hint = 0;
    for (const auto& q : gamma->vertices()) {
        const auto loc = mesh->locate(q, hint);
        hint = loc.tri;
        loc_gamma.push_back(loc);
    }
    for (const auto& q : gamma_prev->vertices()) {
        const auto loc = mesh->locate(q, hint);
        hint = loc.tri;
        loc_gamma_prev.push_back(loc);
    }
}

void assemble_bulk_ns(const StepInputs& in, BlockSystem& sys) {
    const BulkMesh& mesh = *in.mesh;
    const P2Space& vel = *in.vel;
    const PressureSpace& pres = *in.pres;
    const auto& layout = sys.layout;
    const QuadTri& quad = tri_quadrature_deg5();
    const double tau = in.tau;
    const int npd = pres.tri_dof_count();

    const Eigen::VectorXd f1n =
        vel.interpolate([&](const Vec2& z) { return in.params->f1(z, in.t_next); });
    const Eigen::VectorXd f2n =
        vel.interpolate([&](const Vec2& z) { return in.params->f2(z, in.t_next); });

    Eigen::Matrix<double, 12, 12> Aloc;
    Eigen::Matrix<double, 6, 6> Cloc;
    Eigen::Matrix<double, 12, Eigen::Dynamic> Bloc(12, npd);
    Eigen::Matrix<double, 12, 1> bloc;

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double area = mesh.tri_area(t);
        const auto& nd = vel.tri_nodes(t);
        const double mass_coef = 0.5 * ((*in.rho_m)[t] + (*in.rho_old)[t]) / tau;
        const double conv_coef = 0.5 * (*in.rho_m)[t];
        const double mu = (*in.mu_m)[t];
        Aloc.setZero();
        Cloc.setZero();
        Bloc.setZero();
        bloc.setZero();
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const Eigen::Vector3d lam(quad.points[q][0], quad.points[q][1], quad.points[q][2]);
            const double W = area * quad.weights[q];
            const P2Shape sh = vel.shape(t, lam);
            Vec2 wvec = Vec2::Zero(), fval = Vec2::Zero();
            for (int i = 0; i < 6; ++i) {
                const int n = nd[i];
                wvec += sh.value[i] * Vec2(in.u_interp[2 * n], in.u_interp[2 * n + 1]);
                fval += sh.value[i] * ((*in.rho_m)[t] * Vec2(f1n[2 * n], f1n[2 * n + 1]) +
                                       Vec2(f2n[2 * n], f2n[2 * n + 1]));
            }
            for (int i = 0; i < 6; ++i) {
                const double wg_i = wvec.dot(sh.grad[i]);
                for (int j = 0; j < 6; ++j) {
                    const double mass = W * mass_coef * sh.value[i] * sh.value[j];
                    const double conv =
                        W * conv_coef * (wvec.dot(sh.grad[j]) * sh.value[i] - wg_i * sh.value[j]);
                    const double gg = sh.grad[i].dot(sh.grad[j]);
                    Cloc(i, j) += conv;
                    for (int r = 0; r < 2; ++r) {
                        Aloc(2 * i + r, 2 * j + r) += mass + conv + W * mu * gg;
                        for (int s = 0; s < 2; ++s)
                            Aloc(2 * i + r, 2 * j + s) += W * mu * sh.grad[j][r] * sh.grad[i][s];
                    }
                }
                for (int pi = 0; pi < npd; ++pi) {
                    const double psi_v = pres.tri_dof_value(t, pi, lam);
                    for (int r = 0; r < 2; ++r)
                        Bloc(2 * i + r, pi) += W * psi_v * sh.grad[i][r];
                }
                for (int r = 0; r < 2; ++r)
                    bloc[2 * i + r] += W * sh.value[i] * (fval[r] + (*in.rho_old)[t] / tau * wvec[r]);
            }
        }
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                for (int r = 0; r < 2; ++r) {
                    if (Cloc(i, j) != 0.0)
                        sys.convection.emplace_back(2 * nd[i] + r, 2 * nd[j] + r, Cloc(i, j));
                    for (int s = 0; s < 2; ++s) {
                        const double v = Aloc(2 * i + r, 2 * j + s);
                        if (v != 0.0) sys.add(2 * nd[i] + r, 2 * nd[j] + s, v);
                    }
                }
            }
            for (int pi = 0; pi < npd; ++pi) {
                const int pd = pres.tri_dof(t, pi);
                for (int r = 0; r < 2; ++r) {
                    const double v = Bloc(2 * i + r, pi);
                    if (v == 0.0) continue;
                    sys.add(2 * nd[i] + r, layout.col_p(pd), -v);
                    sys.add(layout.row_cont(pd), 2 * nd[i] + r, v);
                }
            }
            for (int r = 0; r < 2; ++r) sys.rhs[2 * nd[i] + r] += bloc[2 * i + r];
        }
    }

    if (pres.has_xfem()) {
        const Eigen::VectorXd col = xfem_volume_column(vel, *in.cls, *in.gamma, XfemRoute::Clipping);
        const int xd = pres.xfem_dof();
        for (int d = 0; d < vel.num_dofs(); ++d) {
            if (col[d] == 0.0) continue;
            sys.add(d, layout.col_p(xd), -col[d]);
            sys.add(layout.row_cont(xd), d, col[d]);
        }
    }

    for (const auto& n : pres.nullspace()) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(layout.total());
        Eigen::VectorXd w = Eigen::VectorXd::Zero(layout.total());
        full.segment(layout.col_p(0), layout.n_p) = n;
        w.segment(layout.col_p(0), layout.n_p) = pres.mass_weights().cwiseProduct(n);
        sys.nullspace.push_back(std::move(full));
        sys.mean_weights.push_back(std::move(w));
    }
}

void assemble_surface_viscosity(const StepInputs& in, BlockSystem& sys) {
    const InterfacePolygon& poly = *in.gamma;
    const PhysicalParams& p = *in.params;
    for (int j = 0; j < poly.num_segments(); ++j) {
        const SegmentFrame fr = segment_frame(poly, j);
        const auto G = hat_gradients(fr);
        const int k0 = poly.seg_vertex(j, 0), k1 = poly.seg_vertex(j, 1);
        const double mu_int =
            0.5 * fr.length * (p.mu_gamma_of((*in.psi)[k0]) + p.mu_gamma_of((*in.psi)[k1]));
        const double la_int = 0.5 * fr.length *
                              (p.lambda_gamma_of((*in.psi)[k0]) + p.lambda_gamma_of((*in.psi)[k1]));
        if (mu_int == 0.0 && la_int == 0.0) continue;
        const std::array<VertexEval, 2> ev{eval_basis_at(*in.vel, in.loc_gamma[k0]),
                                           eval_basis_at(*in.vel, in.loc_gamma[k1])};
        const Mat2 tt = fr.t * fr.t.transpose();
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const Mat2 K = la_int * G[a] * G[b].transpose() +
                               2.0 * mu_int * (G[a].dot(fr.t)) * (G[b].dot(fr.t)) * tt;
                for (int i = 0; i < 6; ++i) {
                    if (ev[a].phi[i] == 0.0) continue;
                    for (int l = 0; l < 6; ++l) {
                        const double w = ev[a].phi[i] * ev[b].phi[l];
                        if (w == 0.0) continue;
                        for (int r = 0; r < 2; ++r)
                            for (int s = 0; s < 2; ++s)
                                sys.add(2 * ev[a].nodes[i] + r, 2 * ev[b].nodes[l] + s,
                                        w * K(r, s));
                    }
                }
            }
        }
    }
}

void assemble_rho_cross_mass(const StepInputs& in, BlockSystem& sys, CrossLevel level) {
    const bool current = level == CrossLevel::Current;
    const InterfacePolygon& poly = current ? *in.gamma : *in.gamma_prev;
    const SurfaceField& rho = current ? *in.rho_gamma : *in.rho_gamma_prev;
    const auto& locs = current ? in.loc_gamma : in.loc_gamma_prev;
    const double tau = in.tau;
    for (int j = 0; j < poly.num_segments(); ++j) {
        const double w = 0.5 * poly.seg_length(j) / tau;
        for (int a = 0; a < 2; ++a) {
            const int k = poly.seg_vertex(j, a);
            const double rv = rho[k];
            if (rv == 0.0) continue;
            if (current) {
                const VertexEval ev = eval_basis_at(*in.vel, locs[k]);
                const double pos = in.scheme == Scheme::BGN ? std::max(rv, 0.0) : rv;
                const double neg = in.scheme == Scheme::BGN ? std::min(rv, 0.0) : 0.0;
                if (pos != 0.0) {
                    for (int i = 0; i < 6; ++i) {
                        if (ev.phi[i] == 0.0) continue;
                        for (int l = 0; l < 6; ++l) {
                            const double v = w * pos * ev.phi[i] * ev.phi[l];
                            if (v == 0.0) continue;
                            for (int r = 0; r < 2; ++r)
                                sys.add(2 * ev.nodes[i] + r, 2 * ev.nodes[l] + r, v);
                        }
                    }
                }
                if (neg != 0.0) {
                    const Vec2 uo = eval_p2(*in.vel, in.u_interp, locs[k]);
                    for (int i = 0; i < 6; ++i)
                        for (int r = 0; r < 2; ++r)
                            sys.rhs[2 * ev.nodes[i] + r] -= w * neg * uo[r] * ev.phi[i];
                }
            } else {
                // old-level lengths and field values, tested at the new vertices
                Vec2 val;
                if (in.scheme == Scheme::BGN) {
                    val = std::max(rv, 0.0) * eval_p2(*in.vel, in.u_interp, locs[k]) +
                          std::min(rv, 0.0) * eval_p2(*in.vel, in.u_prev_interp, locs[k]);
                } else {
                    val = rv * eval_p2(*in.vel, in.u_interp, locs[k]);
                }
                const VertexEval ev = eval_basis_at(*in.vel, in.loc_gamma[k]);
                for (int i = 0; i < 6; ++i)
                    for (int r = 0; r < 2; ++r)
                        sys.rhs[2 * ev.nodes[i] + r] += w * val[r] * ev.phi[i];
            }
        }
    }
}

void assemble_xi_cross(const StepInputs& in, BlockSystem& sys) {
    if (in.scheme != Scheme::BGN) return;
    const InterfacePolygon& old = *in.gamma_prev;
    const Eigen::VectorXd rstar = rho_star(old, *in.rho_gamma_prev);
    const double tau = in.tau;
    for (int j = 0; j < old.num_segments(); ++j) {
        if (rstar[j] == 0.0) continue;
        const SegmentFrame fr = segment_frame(old, j);
        const auto G = hat_gradients(fr);
        Vec2 tsum = Vec2::Zero();
        std::array<Vec2, 2> uo;
        std::array<int, 2> kk;
        for (int a = 0; a < 2; ++a) {
            kk[a] = old.seg_vertex(j, a);
            uo[a] = eval_p2(*in.vel, in.u_interp, in.loc_gamma_prev[kk[a]]);
            tsum += (in.gamma->vertex(kk[a]) - old.vertex(kk[a])) / tau - uo[a];
        }
        const double wj = 0.5 * old.seg_length(j) * rstar[j];
        for (int r = 0; r < 2; ++r) {
            const Mat2 xi = xi_matrix(fr, uo[0][r], uo[1][r]);
            for (int b = 0; b < 2; ++b) {
                const double c = tsum.dot(xi * G[b]);
                if (c == 0.0) continue;
                const VertexEval ev = eval_basis_at(*in.vel, in.loc_gamma_prev[kk[b]]);
                for (int i = 0; i < 6; ++i)
                    sys.rhs[2 * ev.nodes[i] + r] -= wj * c * ev.phi[i];
            }
        }
    }
}

void assemble_curvature_coupling(const StepInputs& in, BlockSystem& sys) {
    const InterfacePolygon& poly = *in.gamma;
    const auto& layout = sys.layout;
    const int K = poly.num_vertices();
    const EquationOfState eos = in.params->eos();
    const double eps = in.params->epsilon_reg;
    const double gamma0 = eos.gamma(0.0);
    const double tau = in.tau;

    // curvature-equation stiffness <grad X, grad eta> (both schemes)
    for (int j = 0; j < K; ++j) {
        const int k0 = poly.seg_vertex(j, 0), k1 = poly.seg_vertex(j, 1);
        const double invL = 1.0 / poly.seg_length(j);
        for (int r = 0; r < 2; ++r) {
            sys.add(layout.row_curv(2 * k0 + r), layout.col_x(2 * k0 + r), invL);
            sys.add(layout.row_curv(2 * k0 + r), layout.col_x(2 * k1 + r), -invL);
            sys.add(layout.row_curv(2 * k1 + r), layout.col_x(2 * k1 + r), invL);
            sys.add(layout.row_curv(2 * k1 + r), layout.col_x(2 * k0 + r), -invL);
        }
    }

    if (in.scheme == Scheme::GD) {
        for (int k = 0; k < K; ++k) {
            const double m = poly.lumped_mass(k);
            const VertexEval ev = eval_basis_at(*in.vel, in.loc_gamma[k]);
            for (int r = 0; r < 2; ++r) {
                sys.add(layout.row_motion(2 * k + r), layout.col_x(2 * k + r), m / tau);
                for (int i = 0; i < 6; ++i)
                    if (ev.phi[i] != 0.0)
                        sys.add(layout.row_motion(2 * k + r), 2 * ev.nodes[i] + r, -m * ev.phi[i]);
                sys.rhs[layout.row_motion(2 * k + r)] += m / tau * poly.vertex(k)[r];
                sys.add(layout.row_curv(2 * k + r), layout.col_k(2 * k + r), m);
                if (gamma0 != 0.0)
                    for (int i = 0; i < 6; ++i)
                        if (ev.phi[i] != 0.0)
                            sys.add(2 * ev.nodes[i] + r, layout.col_k(2 * k + r),
                                    -gamma0 * m * ev.phi[i]);
            }
        }
        // explicit surface-tension load, all mass lumped
        for (int j = 0; j < K; ++j) {
            const SegmentFrame fr = segment_frame(poly, j);
            const int k0 = poly.seg_vertex(j, 0), k1 = poly.seg_vertex(j, 1);
            const Vec2 gm =
                surface_gradient(fr, eos.gamma((*in.psi)[k0]), eos.gamma((*in.psi)[k1]));
            const double half = 0.5 * fr.length;
            for (int a = 0; a < 2; ++a) {
                const int k = a == 0 ? k0 : k1;
                const VertexEval ev = eval_basis_at(*in.vel, in.loc_gamma[k]);
                const double gk = eos.gamma((*in.psi)[k]) - gamma0;
                const Vec2 kv((*in.kappa)[2 * k], (*in.kappa)[2 * k + 1]);
                for (int i = 0; i < 6; ++i) {
                    if (ev.phi[i] == 0.0) continue;
                    for (int r = 0; r < 2; ++r)
                        sys.rhs[2 * ev.nodes[i] + r] += half * (gk * kv[r] + gm[r]) * ev.phi[i];
                }
            }
        }
        return;
    }

    // --- BGN ---
    const auto& gauss = gauss_segment(2);
    for (int k = 0; k < K; ++k) {
        const double m = poly.lumped_mass(k);
        const Vec2 w = poly.vertex_normal(k);
        for (int r = 0; r < 2; ++r) {
            sys.add(layout.row_motion(k), layout.col_x(2 * k + r), m / tau * w[r]);
            sys.add(layout.row_curv(2 * k + r), layout.col_k(k), m * w[r]);
        }
        sys.rhs[layout.row_motion(k)] += m / tau * w.dot(poly.vertex(k));
    }
    // exact segment integrals: <U, chi nu>, the kappa coupling and the
    // explicit (gamma_eps(Psi) - gamma(0)) kappa load
    for (int j = 0; j < K; ++j) {
        const int k0 = poly.seg_vertex(j, 0), k1 = poly.seg_vertex(j, 1);
        const Vec2 a = poly.vertex(k0), b = poly.vertex(k1);
        const Vec2 nu = poly.seg_normal(j);
        const double L = poly.seg_length(j);
        const double c0 = (eos.gamma_eps(eps, (*in.psi)[k0]) - gamma0) * (*in.kappa)[k0];
        const double c1 = (eos.gamma_eps(eps, (*in.psi)[k1]) - gamma0) * (*in.kappa)[k1];
        for (const auto& piece : trace_segment(*in.mesh, a, b)) {
            const double plen = (piece.t1 - piece.t0) * L;
            for (size_t g = 0; g < gauss.points.size(); ++g) {
                const double s = piece.t0 + gauss.points[g] * (piece.t1 - piece.t0);
                const double wq = gauss.weights[g] * plen;
                const Vec2 pt = a + s * (b - a);
                const Eigen::Vector3d lam = in.mesh->barycentric(piece.tri, pt);
                const P2Shape sh = in.vel->shape(piece.tri, lam);
                const auto& nodes = in.vel->tri_nodes(piece.tri);
                const double chi0 = 1.0 - s, chi1 = s;
                const double cexp = chi0 * c0 + chi1 * c1;
                for (int i = 0; i < 6; ++i) {
                    if (sh.value[i] == 0.0) continue;
                    for (int r = 0; r < 2; ++r) {
                        const double base = wq * sh.value[i] * nu[r];
                        sys.add(layout.row_motion(k0), 2 * nodes[i] + r, -chi0 * base);
                        sys.add(layout.row_motion(k1), 2 * nodes[i] + r, -chi1 * base);
                        if (gamma0 != 0.0) {
                            sys.add(2 * nodes[i] + r, layout.col_k(k0), -gamma0 * chi0 * base);
                            sys.add(2 * nodes[i] + r, layout.col_k(k1), -gamma0 * chi1 * base);
                        }
                        if (cexp != 0.0) sys.rhs[2 * nodes[i] + r] += cexp * base;
                    }
                }
            }
        }
        // lumped Marangoni load
        const SegmentFrame fr = segment_frame(poly, j);
        const Vec2 gm = surface_gradient(fr, eos.gamma_eps(eps, (*in.psi)[k0]),
                                         eos.gamma_eps(eps, (*in.psi)[k1]));
        if (gm.norm() > 0.0) {
            for (int ao = 0; ao < 2; ++ao) {
                const int k = ao == 0 ? k0 : k1;
                const VertexEval ev = eval_basis_at(*in.vel, in.loc_gamma[k]);
                for (int i = 0; i < 6; ++i) {
                    if (ev.phi[i] == 0.0) continue;
                    for (int r = 0; r < 2; ++r)
                        sys.rhs[2 * ev.nodes[i] + r] += 0.5 * L * gm[r] * ev.phi[i];
                }
            }
        }
    }
}

double boundary_flux(const P2Space& vel, const Eigen::VectorXd& g_nodal) {
    const BulkMesh& mesh = vel.mesh();
    double flux = 0.0;
    for (const auto& be : mesh.boundary_edges()) {
        if (be.tag != BoundaryTag::Dirichlet) continue; // u.n = 0 on free-slip
        const Vec2 pa = mesh.vertex(be.a), pb = mesh.vertex(be.b);
        const double L = (pb - pa).norm();
        const Vec2 n = rot_minus90((pb - pa) / L);
        const auto& nodes = vel.tri_nodes(be.tri);
        const auto& tv = mesh.tri(be.tri);
        int mid = -1;
        for (int e = 0; e < 3; ++e) {
            const int va = tv[(e + 1) % 3], vb = tv[(e + 2) % 3];
            if ((va == be.a && vb == be.b) || (va == be.b && vb == be.a)) mid = nodes[3 + e];
        }
        const Vec2 ga(g_nodal[2 * be.a], g_nodal[2 * be.a + 1]);
        const Vec2 gb(g_nodal[2 * be.b], g_nodal[2 * be.b + 1]);
        const Vec2 gm(g_nodal[2 * mid], g_nodal[2 * mid + 1]);
        // Simpson's rule, exact for the quadratic trace
        flux += L / 6.0 * (ga.dot(n) + 4.0 * gm.dot(n) + gb.dot(n));
    }
    return flux;
}

void apply_dirichlet(const StepInputs& in, BlockSystem& sys,
                     const std::function<Vec2(const Vec2&)>& g) {
    const P2Space& vel = *in.vel;
    Eigen::VectorXd g_nodal = Eigen::VectorXd::Zero(vel.num_dofs());
    for (int n = 0; n < vel.num_nodes(); ++n) {
        const unsigned char bc = vel.node_bc(n);
        if (bc == 0) continue;
        const Vec2 gv = (vel.node_dirichlet(n) && g) ? g(vel.node(n)) : Vec2::Zero();
        for (int r = 0; r < 2; ++r) {
            if (bc & (1u << r)) {
                g_nodal[2 * n + r] = gv[r];
                sys.constraints.emplace_back(2 * n + r, gv[r]);
            }
        }
    }
    const double flux = boundary_flux(vel, g_nodal);
    if (flux != 0.0) {
        const auto& wts = in.pres->mass_weights();
        const double vol = in.mesh->domain().area();
        for (int p = 0; p < in.pres->num_dofs(); ++p)
            sys.rhs[sys.layout.row_cont(p)] += wts[p] / vol * flux;
    }
}

InterfaceFieldSystems assemble_interface_fields(const InterfacePolygon& gamma_old,
                                                const InterfacePolygon& gamma_new, double tau,
                                                const std::vector<Vec2>& transport,
                                                const SurfaceField& rho_old,
                                                const SurfaceField& psi_old,
                                                const PhysicalParams& params, Scheme scheme) {
    const int K = gamma_new.num_vertices();
    InterfaceFieldSystems out;
    std::vector<Eigen::Triplet<double>> rho_t, psi_t;
    out.rho_rhs = Eigen::VectorXd::Zero(K);
    out.psi_rhs = Eigen::VectorXd::Zero(K);

    for (int k = 0; k < K; ++k) {
        const double m_new = gamma_new.lumped_mass(k);
        const double m_old = gamma_old.lumped_mass(k);
        rho_t.emplace_back(k, k, m_new);
        psi_t.emplace_back(k, k, m_new);
        out.rho_rhs[k] = m_old * rho_old[k];
        out.psi_rhs[k] = m_old * psi_old[k];
    }
    if (params.d_gamma > 0.0) {
        for (int j = 0; j < gamma_new.num_segments(); ++j) {
            const int k0 = gamma_new.seg_vertex(j, 0), k1 = gamma_new.seg_vertex(j, 1);
            const double w = tau * params.d_gamma / gamma_new.seg_length(j);
            psi_t.emplace_back(k0, k0, w);
            psi_t.emplace_back(k1, k1, w);
            psi_t.emplace_back(k0, k1, -w);
            psi_t.emplace_back(k1, k0, -w);
        }
    }
    if (scheme == Scheme::BGN) {
        const EquationOfState eos = params.eos();
        const Eigen::VectorXd rstar = rho_star(gamma_old, rho_old);
        const double nd = params.theta_diffusion(gamma_old.h_gamma());
        for (int j = 0; j < gamma_old.num_segments(); ++j) {
            const SegmentFrame fr = segment_frame(gamma_old, j);
            const auto G = hat_gradients(fr);
            const int k0 = gamma_old.seg_vertex(j, 0), k1 = gamma_old.seg_vertex(j, 1);
            const Vec2 tsum = transport[k0] + transport[k1];
            const double half = 0.5 * fr.length;
            const double pstar = psi_star_eps(eos, params.epsilon_reg, psi_old[k0], psi_old[k1]);
            for (int b = 0; b < 2; ++b) {
                const int kb = b == 0 ? k0 : k1;
                out.rho_rhs[kb] -= tau * half * rstar[j] * tsum.dot(G[b]);
                out.psi_rhs[kb] -= tau * half * pstar * tsum.dot(G[b]);
            }
            if (nd > 0.0) {
                const Vec2 grho = surface_gradient(fr, rho_old[k0], rho_old[k1]);
                const double speed = (fr.projection * transport[k0]).norm() +
                                     (fr.projection * transport[k1]).norm();
                for (int b = 0; b < 2; ++b) {
                    const int kb = b == 0 ? k0 : k1;
                    out.rho_rhs[kb] -= tau * nd * half * speed * grho.dot(G[b]);
                }
            }
        }
    }
    out.rho_matrix.resize(K, K);
    out.rho_matrix.setFromTriplets(rho_t.begin(), rho_t.end());
    out.psi_matrix.resize(K, K);
    out.psi_matrix.setFromTriplets(psi_t.begin(), psi_t.end());
    return out;
}

Eigen::VectorXd initial_curvature_gd(const InterfacePolygon& poly) {
    const int K = poly.num_vertices();
    Eigen::VectorXd kappa = Eigen::VectorXd::Zero(2 * K);
    for (int j = 0; j < K; ++j) {
        const int k0 = poly.seg_vertex(j, 0), k1 = poly.seg_vertex(j, 1);
        const Vec2 d = (poly.vertex(k1) - poly.vertex(k0)) / poly.seg_length(j);
        for (int r = 0; r < 2; ++r) {
            kappa[2 * k0 + r] += d[r];
            kappa[2 * k1 + r] -= d[r];
        }
    }
    for (int k = 0; k < K; ++k)
        for (int r = 0; r < 2; ++r) kappa[2 * k + r] /= poly.lumped_mass(k);
    return kappa;
}

} // namespace bsflow
