#include "bsflow/exact_solutions.hpp"

#include "bsflow/errors.hpp"

#include <cmath>

namespace bsflow {

double exact_radius(const ExpandingBubbleParams& p, double t) {
    return std::sqrt(p.r0 * p.r0 + 2.0 * p.alpha * t);
}

double exact_theta(const ExpandingBubbleParams& p, double t) {
    const double r = exact_radius(p, t);
    const double r2 = r * r;
    return (p.gamma_bar + p.alpha / r2 * (2.0 * p.mu_gamma_bar + p.lambda_gamma_bar) -
            p.alpha * p.alpha * p.r0 / (r2 * r) * p.rho_gamma0_bar) /
               r +
           2.0 * p.alpha / r2 * (p.mu_plus - p.mu_minus);
}

ExactBubbleState exact_state(const ExpandingBubbleParams& p, double t, const Vec2& z,
                             const Domain& domain) {
    const double n2 = z.squaredNorm();
    if (n2 == 0.0) throw GeometricError("exact expanding-bubble fields are singular at the origin");
    ExactBubbleState s;
    s.r = exact_radius(p, t);
    s.u = p.alpha / n2 * z;
    s.g = s.u;
    s.f1 = -p.alpha * p.alpha / (n2 * n2) * z;
    s.rho_gamma = p.r0 / s.r * p.rho_gamma0_bar;
    s.theta = exact_theta(p, t);
    double hole = 0.0;
    if (domain.has_hole)
        hole = (domain.hole_hi.x() - domain.hole_lo.x()) * (domain.hole_hi.y() - domain.hole_lo.y());
    const double vol_minus = M_PI * s.r * s.r - hole;
    const double chi = std::sqrt(n2) < s.r ? 1.0 : 0.0;
    s.p = s.theta * (chi - vol_minus / domain.area());
    return s;
}

void ErrorAccumulator::observe(const SimulationState& state) {
    observe(state.interface(), state.velocity(), state.pressure(), state.time());
}

void ErrorAccumulator::observe(const InterfacePolygon& gamma, const VelocitySnapshot& vel,
                               const PressureSnapshot& pr, double t) {
    const double r = exact_radius(p_, t);

    // interface error: vertex distance to the exact circle
    for (const auto& q : gamma.vertices())
        acc_.x_err = std::max(acc_.x_err, std::abs(q.norm() - r));

    // velocity error at the P2 nodes of the solve mesh
    for (int n = 0; n < vel.space->num_nodes(); ++n) {
        const Vec2 z = vel.space->node(n);
        const Vec2 ue = p_.alpha / z.squaredNorm() * z;
        const Vec2 uh(vel.coef[2 * n], vel.coef[2 * n + 1]);
        acc_.u_err = std::max(acc_.u_err, (uh - ue).norm());
    }

    // pressure: strip the enrichment and compare against the constant
    // p_c = -theta(t) vol(Omega_-(t)) / vol(Omega)
    if (!pr.space) throw ConfigError("pressure errors need the enrichment coefficient");
    double hole = 0.0;
    if (domain_.has_hole)
        hole = (domain_.hole_hi.x() - domain_.hole_lo.x()) *
               (domain_.hole_hi.y() - domain_.hole_lo.y());
    const double pc_exact = -exact_theta(p_, t) * (M_PI * r * r - hole) / domain_.area();
    const BulkMesh& mesh = pr.space->mesh();
    const QuadTri& quad = tri_quadrature_deg5();
    double l2 = 0.0;
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double acc = 0.0;
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const Eigen::Vector3d lam(quad.points[q][0], quad.points[q][1], quad.points[q][2]);
            double ph = 0.0;
            for (int i = 0; i < pr.space->tri_dof_count(); ++i)
                ph += pr.coef[pr.space->tri_dof(tri, i)] * pr.space->tri_dof_value(tri, i, lam);
            const double d = ph - pc_exact;
            acc += quad.weights[q] * d * d;
        }
        l2 += mesh.tri_area(tri) * acc;
    }
    acc_.pc_err += l2; // accumulate tau * sum below

    const double dth = pr.theta - exact_theta(p_, t);
    acc_.theta_err += dth * dth;
    ++steps_;
}

ErrorNorms ErrorAccumulator::finalize() const {
    ErrorNorms out = acc_;
    out.pc_err = std::sqrt(tau_ * acc_.pc_err);
    out.theta_err = std::sqrt(tau_ * acc_.theta_err);
    return out;
}

} // namespace bsflow
