#include "bsflow/timestepper.hpp"

#include "bsflow/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace bsflow {

namespace {

double bulk_kinetic(const BulkMesh& mesh, const Eigen::VectorXd& rho, const P2Space& vel,
                    const Eigen::VectorXd& u) {
    const QuadTri& quad = tri_quadrature_deg5();
    double e = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (rho[t] == 0.0) continue;
        const auto& nd = vel.tri_nodes(t);
        double acc = 0.0;
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const Eigen::Vector3d lam(quad.points[q][0], quad.points[q][1], quad.points[q][2]);
            const P2Shape sh = vel.shape(t, lam);
            Vec2 v = Vec2::Zero();
            for (int i = 0; i < 6; ++i)
                v += sh.value[i] * Vec2(u[2 * nd[i]], u[2 * nd[i] + 1]);
            acc += quad.weights[q] * v.squaredNorm();
        }
        e += 0.5 * rho[t] * mesh.tri_area(t) * acc;
    }
    return e;
}

double bulk_viscous(const BulkMesh& mesh, const Eigen::VectorXd& mu, const P2Space& vel,
                    const Eigen::VectorXd& u) {
    const QuadTri& quad = tri_quadrature_deg5();
    double e = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        double acc = 0.0;
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const Eigen::Vector3d lam(quad.points[q][0], quad.points[q][1], quad.points[q][2]);
            const Mat2 g = vel.evaluate_gradient(u, t, lam);
            const Mat2 d = 0.5 * (g + g.transpose());
            acc += quad.weights[q] * (d.array() * d.array()).sum();
        }
        e += 2.0 * mu[t] * mesh.tri_area(t) * acc;
    }
    return e;
}

double surface_viscous(const InterfacePolygon& poly, const PhysicalParams& p,
                       const SurfaceField& psi, const std::vector<Vec2>& u_at_vertices) {
    double e = 0.0;
    for (int j = 0; j < poly.num_segments(); ++j) {
        const SegmentFrame fr = segment_frame(poly, j);
        const int k0 = poly.seg_vertex(j, 0), k1 = poly.seg_vertex(j, 1);
        const auto r = rate_of_deformation(fr, u_at_vertices[k0], u_at_vertices[k1]);
        const double mu_int = 0.5 * fr.length * (p.mu_gamma_of(psi[k0]) + p.mu_gamma_of(psi[k1]));
        const double la_int =
            0.5 * fr.length * (p.lambda_gamma_of(psi[k0]) + p.lambda_gamma_of(psi[k1]));
        e += 2.0 * mu_int * (r.Ds.array() * r.Ds.array()).sum() + la_int * r.div_s * r.div_s;
    }
    return e;
}

void write_bytes(std::ofstream& os, const void* p, size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& is, void* p, size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw ConfigError("truncated checkpoint file");
}

void write_vec(std::ofstream& os, const Eigen::VectorXd& v) {
    const std::int64_t n = v.size();
    write_bytes(os, &n, sizeof(n));
    write_bytes(os, v.data(), sizeof(double) * static_cast<size_t>(n));
}

Eigen::VectorXd read_vec(std::ifstream& is) {
    std::int64_t n = 0;
    read_bytes(is, &n, sizeof(n));
    Eigen::VectorXd v(n);
    read_bytes(is, v.data(), sizeof(double) * static_cast<size_t>(n));
    return v;
}

} // namespace

void SimulationState::rebuild_bulk(const InterfacePolygon& gamma, bool first) {
    const BulkMesh base = build_uniform_mesh(domain_, n_coarse_);
    auto mesh = std::make_shared<BulkMesh>(adapt_mesh(first ? base : *mesh_, gamma, n_fine_,
                                                      n_coarse_));
    mesh_ = mesh;
    cls_ = classify_elements(*mesh_, gamma);
    piecewise_coefficients(*mesh_, cls_, params_, rho_m_, mu_m_);
    vel_ = std::make_shared<P2Space>(*mesh_);
}

SimulationState SimulationState::create(Scheme scheme, const PhysicalParams& params,
                                        const Domain& domain, int n_fine, int n_coarse,
                                        double tau, bool xfem, const InitialData& initial,
                                        std::function<Vec2(const Vec2&, double)> boundary_g) {
    params.validate();
    if (tau <= 0.0) throw ConfigError("time step must be positive");
    SimulationState st;
    st.scheme_ = scheme;
    st.params_ = params;
    st.domain_ = domain;
    st.n_fine_ = n_fine;
    st.n_coarse_ = n_coarse;
    st.tau_ = tau;
    st.xfem_ = xfem;
    st.boundary_g_ = std::move(boundary_g);

    st.gamma_ = initial.gamma0;
    st.gamma_prev_ = initial.gamma0;
    st.rebuild_bulk(st.gamma_, true);

    const int K = st.gamma_.num_vertices();
    st.psi_ = make_surface_field(st.gamma_, SurfaceRole::Surfactant, 1.0);
    st.rho_gamma_ = make_surface_field(st.gamma_, SurfaceRole::Density, 1.0);
    for (int k = 0; k < K; ++k) {
        if (initial.psi0) st.psi_[k] = initial.psi0(st.gamma_.vertex(k));
        if (initial.rho_gamma0) st.rho_gamma_[k] = initial.rho_gamma0(st.gamma_.vertex(k));
    }
    st.rho_gamma_prev_ = st.rho_gamma_;

    if (scheme == Scheme::GD) {
        st.kappa_ = initial_curvature_gd(st.gamma_);
    } else if (initial.kappa0_bgn) {
        st.kappa_ = Eigen::VectorXd::Constant(K, *initial.kappa0_bgn);
    } else {
        // project the discrete curvature vector onto the vertex normals
        const Eigen::VectorXd kv = initial_curvature_gd(st.gamma_);
        st.kappa_.resize(K);
        for (int k = 0; k < K; ++k) {
            const Vec2 w = st.gamma_.vertex_normal(k);
            st.kappa_[k] = Vec2(kv[2 * k], kv[2 * k + 1]).dot(w) / w.squaredNorm();
        }
    }

    Eigen::VectorXd u0;
    if (initial.u0) {
        u0 = st.vel_->interpolate([&](const Vec2& z) { return initial.u0(z); });
    } else {
        u0 = Eigen::VectorXd::Zero(st.vel_->num_dofs());
    }
    st.u_m_ = {st.mesh_, st.vel_, u0};
    st.u_prev_ = st.u_m_;
    st.mesh_prev_ = st.mesh_;
    st.rho_prev_ = st.rho_m_;
    st.u_prev_adapt_ = st.gamma_.vertices();
    st.pressure_ = {};
    return st;
}

StepReport SimulationState::step() {
    // well-posedness checks
    gamma_.require_valid();
    if (gamma_.min_edge() <= 0.0) throw GeometricError("degenerate interface segment");
    if (!gamma_.vertex_normals_span_full())
        throw GeometricError("vertex normals do not span the plane");

    StepInputs in;
    in.scheme = scheme_;
    in.tau = tau_;
    in.t_next = t_ + tau_;
    in.params = &params_;
    in.mesh = mesh_.get();
    in.cls = &cls_;
    in.rho_m = &rho_m_;
    in.mu_m = &mu_m_;
    in.vel = vel_.get();
    in.gamma = &gamma_;
    in.gamma_prev = &gamma_prev_;
    in.rho_gamma = &rho_gamma_;
    in.rho_gamma_prev = &rho_gamma_prev_;
    in.psi = &psi_;
    in.kappa = &kappa_;

    const bool same_mesh = u_m_.space.get() == vel_.get();
    in.u_interp = same_mesh ? u_m_.coef : vel_->interpolate_from(*u_m_.space, u_m_.coef);
    in.u_prev_interp = (u_prev_.space.get() == vel_.get())
                           ? u_prev_.coef
                           : vel_->interpolate_from(*u_prev_.space, u_prev_.coef);
    const Eigen::VectorXd rho_old =
        (mesh_prev_.get() == mesh_.get()) ? rho_prev_ : project_p0(*mesh_prev_, rho_prev_, *mesh_);
    in.rho_old = &rho_old;
    in.cache_locations();

    auto pres = std::make_shared<PressureSpace>(*mesh_, PressureKind::P1, xfem_, &cls_, &gamma_);
    in.pres = pres.get();

    BlockSystem sys;
    sys.init(scheme_, vel_->num_dofs(), pres->num_dofs(), gamma_.num_vertices());
    assemble_bulk_ns(in, sys);
    assemble_surface_viscosity(in, sys);
    assemble_rho_cross_mass(in, sys, CrossLevel::Current);
    assemble_rho_cross_mass(in, sys, CrossLevel::Previous);
    assemble_xi_cross(in, sys);
    assemble_curvature_coupling(in, sys);
    std::function<Vec2(const Vec2&)> g;
    if (boundary_g_) g = [&](const Vec2& z) { return boundary_g_(z, t_ + tau_); };
    apply_dirichlet(in, sys, g);

    const SaddleSolution sol = solve_saddle_point(sys);

    const int K = gamma_.num_vertices();
    std::vector<Vec2> xnew(K);
    for (int k = 0; k < K; ++k) xnew[k] = Vec2(sol.x[2 * k], sol.x[2 * k + 1]);
    InterfacePolygon gamma_new(std::move(xnew), gamma_.generation() + 1);
    gamma_new.require_valid();

    // transport velocity of the vertices relative to the fluid
    std::vector<Vec2> transport(K, Vec2::Zero());
    for (int k = 0; k < K; ++k) {
        const Vec2 uh = vel_->evaluate(sol.u, in.loc_gamma[k].tri, in.loc_gamma[k].lambda);
        transport[k] = (gamma_new.vertex(k) - gamma_.vertex(k)) / tau_ - uh;
    }

    const InterfaceFieldSystems ifs = assemble_interface_fields(
        gamma_, gamma_new, tau_, transport, rho_gamma_, psi_, params_, scheme_);
    const Eigen::VectorXd rho_new = solve_spd(SparseMatrix(ifs.rho_matrix, true), ifs.rho_rhs);
    const Eigen::VectorXd psi_new = solve_spd(SparseMatrix(ifs.psi_matrix, true), ifs.psi_rhs);

    // energy ledger of this step
    StepReport rep;
    rep.residual = sol.residual;
    const double gamma0 = params_.eos().gamma(0.0);
    rep.energy_old = bulk_kinetic(*mesh_, rho_old, *vel_, in.u_interp) +
                     gamma0 * gamma_.total_length();
    rep.energy_new =
        bulk_kinetic(*mesh_, rho_m_, *vel_, sol.u) + gamma0 * gamma_new.total_length();
    rep.bulk_dissipation = tau_ * bulk_viscous(*mesh_, mu_m_, *vel_, sol.u);
    const Eigen::VectorXd du = sol.u - in.u_interp;
    std::vector<Vec2> u_on_gamma(K);
    for (int k = 0; k < K; ++k)
        u_on_gamma[k] = vel_->evaluate(sol.u, in.loc_gamma[k].tri, in.loc_gamma[k].lambda);
    rep.dissipation = bulk_kinetic(*mesh_, rho_old, *vel_, du) + rep.bulk_dissipation +
                      tau_ * surface_viscous(gamma_, params_, psi_, u_on_gamma);

    // shift the time levels
    u_prev_adapt_ = gamma_prev_.vertices();
    gamma_prev_ = std::move(gamma_);
    gamma_ = std::move(gamma_new);
    rho_gamma_prev_ = std::move(rho_gamma_);
    rho_gamma_ = SurfaceField{rho_new, SurfaceRole::Density, gamma_.generation()};
    psi_ = SurfaceField{psi_new, SurfaceRole::Surfactant, gamma_.generation()};
    kappa_ = sol.kappa;
    u_prev_ = std::move(u_m_);
    u_m_ = {mesh_, vel_, sol.u};
    pressure_ = {pres, sol.p, xfem_ ? sol.p[pres->xfem_dof()] : 0.0};
    mesh_prev_ = mesh_;
    rho_prev_ = rho_m_;
    rebuild_bulk(gamma_, false);

    level_ += 1;
    t_ += tau_;
    report_ = rep;
    return rep;
}

DiagnosticsRecord SimulationState::diagnostics() const {
    DiagnosticsRecord d;
    d.t = t_;
    // U^m lives on the previous mesh, paired with the level m-1 density field
    d.kinetic = bulk_kinetic(*u_m_.mesh, rho_prev_, *u_m_.space, u_m_.coef);
    const int K = gamma_.num_vertices();
    int hint = 0;
    Eigen::VectorXd usq(K);
    for (int k = 0; k < K; ++k) {
        const auto loc = u_m_.mesh->locate(gamma_.vertex(k), hint);
        hint = loc.tri;
        usq[k] = u_m_.space->evaluate(u_m_.coef, loc.tri, loc.lambda).squaredNorm();
    }
    d.surface_kinetic = 0.5 * lumped_inner_product(gamma_, rho_gamma_.values, usq);
    const EquationOfState eos = params_.eos();
    d.interface_energy = lumped_inner_product(gamma_, [&](int j, int a) {
        return eos.f_eps(params_.epsilon_reg, psi_[gamma_.seg_vertex(j, a)]);
    });
    d.total_psi = integrate_p1(gamma_, psi_.values);
    d.total_rho_gamma = integrate_p1(gamma_, rho_gamma_.values);
    d.enclosed_area = gamma_.enclosed_area();
    d.min_psi = psi_.values.minCoeff();
    d.max_psi = psi_.values.maxCoeff();
    d.min_rho_gamma = rho_gamma_.values.minCoeff();
    d.max_rho_gamma = rho_gamma_.values.maxCoeff();
    d.edge_ratio = gamma_.edge_ratio();
    d.bulk_dissipation = report_.bulk_dissipation;
    return d;
}

void SimulationState::save_checkpoint(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open checkpoint file for writing: " + path);
    const char magic[8] = {'B', 'S', 'F', 'L', 'O', 'W', 'C', 'K'};
    write_bytes(os, magic, 8);
    const std::int32_t version = 1;
    write_bytes(os, &version, sizeof(version));
    const std::int32_t scheme = scheme_ == Scheme::GD ? 0 : 1;
    write_bytes(os, &scheme, sizeof(scheme));
    const std::int32_t geom[3] = {static_cast<std::int32_t>(n_fine_),
                                  static_cast<std::int32_t>(n_coarse_),
                                  static_cast<std::int32_t>(xfem_ ? 1 : 0)};
    write_bytes(os, geom, sizeof(geom));
    const std::int64_t level = level_;
    write_bytes(os, &level, sizeof(level));
    const std::int64_t gen[2] = {gamma_.generation(), mesh_->generation()};
    write_bytes(os, gen, sizeof(gen));
    write_bytes(os, &t_, sizeof(t_));
    write_bytes(os, &tau_, sizeof(tau_));
    const double dom[8] = {domain_.lo.x(),      domain_.lo.y(),      domain_.hi.x(),
                           domain_.hi.y(),      domain_.hole_lo.x(), domain_.hole_lo.y(),
                           domain_.hole_hi.x(), domain_.hole_hi.y()};
    write_bytes(os, dom, sizeof(dom));
    const std::int32_t flags[2] = {domain_.has_hole ? 1 : 0, domain_.sides_free_slip ? 1 : 0};
    write_bytes(os, flags, sizeof(flags));

    auto write_poly = [&](const std::vector<Vec2>& q) {
        Eigen::VectorXd v(2 * q.size());
        for (size_t k = 0; k < q.size(); ++k) {
            v[2 * k] = q[k].x();
            v[2 * k + 1] = q[k].y();
        }
        write_vec(os, v);
    };
    write_poly(gamma_.vertices());
    write_poly(gamma_prev_.vertices());
    // the level m-2 interface pins the mesh that carries U^{m-1}
    write_poly(u_prev_adapt_);
    write_vec(os, rho_gamma_.values);
    write_vec(os, rho_gamma_prev_.values);
    write_vec(os, psi_.values);
    write_vec(os, kappa_);
    write_vec(os, u_m_.coef);
    write_vec(os, u_prev_.coef);
    write_vec(os, pressure_.coef.size() ? pressure_.coef : Eigen::VectorXd::Zero(0));
}

SimulationState SimulationState::load_checkpoint(const std::string& path,
                                                 const PhysicalParams& params,
                                                 std::function<Vec2(const Vec2&, double)> g) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open checkpoint file: " + path);
    char magic[8];
    read_bytes(is, magic, 8);
    if (std::memcmp(magic, "BSFLOWCK", 8) != 0) throw ConfigError("not a checkpoint file");
    std::int32_t version;
    read_bytes(is, &version, sizeof(version));
    if (version != 1) throw ConfigError("unsupported checkpoint version");
    std::int32_t scheme, geom[3];
    read_bytes(is, &scheme, sizeof(scheme));
    read_bytes(is, geom, sizeof(geom));
    std::int64_t level, gen[2];
    read_bytes(is, &level, sizeof(level));
    read_bytes(is, gen, sizeof(gen));
    double t, tau, dom[8];
    read_bytes(is, &t, sizeof(t));
    read_bytes(is, &tau, sizeof(tau));
    read_bytes(is, dom, sizeof(dom));
    std::int32_t flags[2];
    read_bytes(is, flags, sizeof(flags));

    SimulationState st;
    st.scheme_ = scheme == 0 ? Scheme::GD : Scheme::BGN;
    st.params_ = params;
    st.boundary_g_ = std::move(g);
    st.n_fine_ = geom[0];
    st.n_coarse_ = geom[1];
    st.xfem_ = geom[2] != 0;
    st.level_ = static_cast<int>(level);
    st.t_ = t;
    st.tau_ = tau;
    st.domain_.lo = Vec2(dom[0], dom[1]);
    st.domain_.hi = Vec2(dom[2], dom[3]);
    st.domain_.hole_lo = Vec2(dom[4], dom[5]);
    st.domain_.hole_hi = Vec2(dom[6], dom[7]);
    st.domain_.has_hole = flags[0] != 0;
    st.domain_.sides_free_slip = flags[1] != 0;

    auto read_pts = [&]() {
        const Eigen::VectorXd v = read_vec(is);
        std::vector<Vec2> q(v.size() / 2);
        for (size_t k = 0; k < q.size(); ++k) q[k] = Vec2(v[2 * k], v[2 * k + 1]);
        return q;
    };
    st.gamma_ = InterfacePolygon(read_pts(), gen[0]);
    st.gamma_prev_ = InterfacePolygon(read_pts(), gen[0] - 1);
    st.u_prev_adapt_ = read_pts();
    st.rho_gamma_ = {read_vec(is), SurfaceRole::Density, gen[0]};
    st.rho_gamma_prev_ = {read_vec(is), SurfaceRole::Density, gen[0] - 1};
    st.psi_ = {read_vec(is), SurfaceRole::Surfactant, gen[0]};
    st.kappa_ = read_vec(is);
    const Eigen::VectorXd u_m = read_vec(is);
    const Eigen::VectorXd u_prev = read_vec(is);
    const Eigen::VectorXd p_coef = read_vec(is);

    // rebuild the mesh hierarchy deterministically from the stored interfaces
    const BulkMesh base = build_uniform_mesh(st.domain_, st.n_coarse_);
    const InterfacePolygon adapt2(st.u_prev_adapt_);
    auto mesh2 = std::make_shared<BulkMesh>(adapt_mesh(base, adapt2, st.n_fine_, st.n_coarse_));
    auto vel2 = std::make_shared<P2Space>(*mesh2);
    auto mesh1 =
        std::make_shared<BulkMesh>(adapt_mesh(base, st.gamma_prev_, st.n_fine_, st.n_coarse_));
    auto vel1 = std::make_shared<P2Space>(*mesh1);
    const auto cls1 = classify_elements(*mesh1, st.gamma_prev_);
    Eigen::VectorXd mu_prev;
    piecewise_coefficients(*mesh1, cls1, st.params_, st.rho_prev_, mu_prev);
    st.mesh_prev_ = mesh1;
    st.u_m_ = {mesh1, vel1, u_m};
    st.u_prev_ = {mesh2, vel2, u_prev};
    st.rebuild_bulk(st.gamma_, true);
    if (p_coef.size() > 0) {
        auto pspace = std::make_shared<PressureSpace>(*mesh1, PressureKind::P1, st.xfem_, &cls1,
                                                      &st.gamma_prev_);
        st.pressure_ = {pspace, p_coef, st.xfem_ ? p_coef[pspace->xfem_dof()] : 0.0};
    }
    return st;
}

} // namespace bsflow
