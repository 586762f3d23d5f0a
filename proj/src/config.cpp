#include "bsflow/config.hpp"

#include "bsflow/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace bsflow {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (schema_version != 1) throw ConfigError("unsupported config schema version");
    if (tau <= 0.0) throw ConfigError("tau must be positive");
    if (tmax < tau) throw ConfigError("tmax must be at least one step");
    if (nf < nc || nc < 1) throw ConfigError("need nf >= nc >= 1");
    if (kgamma < 3) throw ConfigError("need kgamma >= 3");
    if (scheme != "gd" && scheme != "bgn") throw ConfigError("scheme must be gd or bgn");
    if (eos != "constant" && eos != "linear" && eos != "langmuir")
        throw ConfigError("unknown equation of state: " + eos);
    physical().validate();
}

Scheme ExperimentConfig::scheme_enum() const { return scheme == "gd" ? Scheme::GD : Scheme::BGN; }

Domain ExperimentConfig::domain() const {
    Domain d;
    d.lo = Vec2(dom_lo_x, dom_lo_y);
    d.hi = Vec2(dom_hi_x, dom_hi_y);
    d.has_hole = hole;
    d.hole_lo = Vec2(hole_lo_x, hole_lo_y);
    d.hole_hi = Vec2(hole_hi_x, hole_hi_y);
    d.sides_free_slip = sides_free_slip;
    return d;
}

PhysicalParams ExperimentConfig::physical() const {
    PhysicalParams p;
    p.rho_plus = rho_plus;
    p.rho_minus = rho_minus;
    p.mu_plus = mu_plus;
    p.mu_minus = mu_minus;
    p.gamma_bar = gamma_bar;
    p.beta = beta;
    p.psi_infinity =
        psi_infinity > 0.0 ? psi_infinity : std::numeric_limits<double>::infinity();
    p.eos_kind = eos == "linear"     ? EosKind::Linear
                 : eos == "langmuir" ? EosKind::Langmuir
                                     : EosKind::Constant;
    p.d_gamma = d_gamma;
    p.mu_gamma_bar = mu_gamma_bar;
    p.lambda_gamma_bar = lambda_gamma_bar;
    p.b_mu = b_mu;
    p.b_lambda = b_lambda;
    p.epsilon_reg = epsilon_reg;
    p.numdiff_slope = numdiff ? 1.0 / 20.0 : 0.0;
    if (forcing == "gravity") {
        const double gval = gravity;
        p.gravity_force = [gval](const Vec2&, double) { return Vec2(0.0, -gval); };
    } else if (forcing == "expanding") {
        const double a2 = alpha * alpha;
        p.gravity_force = [a2](const Vec2& z, double) {
            const double n2 = z.squaredNorm();
            return Vec2(-a2 / (n2 * n2) * z);
        };
    }
    return p;
}

std::function<Vec2(const Vec2&, double)> ExperimentConfig::boundary_field() const {
    if (velocity_bc == "shear") return [](const Vec2& z, double) { return Vec2(0.5 * z.y(), 0.0); };
    if (velocity_bc == "expanding") {
        const double a = alpha;
        return [a](const Vec2& z, double) { return Vec2(a / z.squaredNorm() * z); };
    }
    return {};
}

InitialData ExperimentConfig::initial() const {
    InitialData init;
    const Vec2 c(cx, cy);
    if (initial_shape == "ellipse")
        init.gamma0 = make_ellipse(c, ell_a, ell_b, kgamma);
    else
        init.gamma0 = make_circle(c, r0, kgamma);
    if (initial_shape == "circle") init.kappa0_bgn = -1.0 / r0;
    if (u0_from_bc) {
        auto g = boundary_field();
        const double s = u0_scale;
        if (g) init.u0 = [g, s](const Vec2& z) { return Vec2(s * g(z, 0.0)); };
    }
    if (psi0 == "onesided") {
        init.psi0 = [](const Vec2& z) { return 1e-6 + std::max(0.0, z.x()); };
    }
    const double rg0 = rho_gamma0;
    init.rho_gamma0 = [rg0](const Vec2&) { return rg0; };
    return init;
}

std::optional<ExpandingBubbleParams> ExperimentConfig::exact() const {
    if (velocity_bc != "expanding") return std::nullopt;
    ExpandingBubbleParams e;
    e.alpha = alpha;
    e.r0 = r0;
    e.rho_gamma0_bar = rho_gamma0;
    e.gamma_bar = gamma_bar;
    e.mu_gamma_bar = mu_gamma_bar;
    e.lambda_gamma_bar = lambda_gamma_bar;
    e.mu_plus = mu_plus;
    e.mu_minus = mu_minus;
    return e;
}

namespace {

#define BSFLOW_CONFIG_FIELDS(OP)                                                                  \
    OP(schema_version) OP(preset) OP(scheme) OP(nf) OP(nc) OP(kgamma) OP(tau) OP(tmax) OP(xfem)   \
    OP(numdiff) OP(eos) OP(out) OP(cadence) OP(rho_plus) OP(rho_minus) OP(mu_plus) OP(mu_minus)   \
    OP(gamma_bar) OP(beta) OP(psi_infinity) OP(d_gamma) OP(mu_gamma_bar) OP(lambda_gamma_bar)     \
    OP(b_mu) OP(b_lambda) OP(epsilon_reg) OP(dom_lo_x) OP(dom_lo_y) OP(dom_hi_x) OP(dom_hi_y)     \
    OP(hole) OP(hole_lo_x) OP(hole_lo_y) OP(hole_hi_x) OP(hole_hi_y) OP(sides_free_slip)          \
    OP(initial_shape) OP(cx) OP(cy) OP(r0) OP(ell_a) OP(ell_b) OP(velocity_bc) OP(forcing)        \
    OP(gravity) OP(alpha) OP(psi0) OP(rho_gamma0) OP(u0_scale) OP(u0_from_bc)

} // namespace

std::string ExperimentConfig::to_json() const {
    json j;
#define BSFLOW_PUT(name) j[#name] = name;
    BSFLOW_CONFIG_FIELDS(BSFLOW_PUT)
#undef BSFLOW_PUT
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
#define BSFLOW_GET(name)                                                                          \
    if (j.contains(#name)) j.at(#name).get_to(c.name);
    BSFLOW_CONFIG_FIELDS(BSFLOW_GET)
#undef BSFLOW_GET
    c.validate();
    return c;
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    if (name == "expanding" || name == "convergence-uniform") {
        c.scheme = "bgn";
        c.dom_lo_x = c.dom_lo_y = -1.0;
        c.dom_hi_x = c.dom_hi_y = 1.0;
        c.hole = true;
        c.hole_lo_x = c.hole_lo_y = -1.0 / 3.0;
        c.hole_hi_x = c.hole_hi_y = 1.0 / 3.0;
        c.eos = "constant";
        c.rho_plus = c.rho_minus = 0.0;
        c.mu_plus = c.mu_minus = 1.0;
        c.gamma_bar = 1.0;
        c.mu_gamma_bar = c.lambda_gamma_bar = 1.0;
        c.rho_gamma0 = 1.0;
        c.alpha = 0.15;
        c.r0 = 0.5;
        c.velocity_bc = "expanding";
        c.forcing = "expanding";
        c.u0_from_bc = true;
        // one row of the uniform-mesh convergence family: 1/h = 3
        c.nf = c.nc = 6;
        c.kgamma = 28; // h_Gamma roughly a third of the bulk mesh size
        c.tau = 1e-2;
        c.tmax = 1.0;
    } else if (name == "shear2d" || name == "shear2d-surfactant") {
        c.dom_lo_x = -5.0;
        c.dom_hi_x = 5.0;
        c.dom_lo_y = -2.0;
        c.dom_hi_y = 2.0;
        c.rho_plus = c.rho_minus = 1.0;
        c.mu_plus = c.mu_minus = 0.1;
        c.gamma_bar = 0.2;
        c.d_gamma = 0.1;
        c.r0 = 1.0;
        c.velocity_bc = "shear";
        c.u0_from_bc = true;
        c.nf = 64;
        c.nc = 8;
        c.kgamma = 64;
        c.tau = 5e-3;
        c.tmax = 4.0;
        if (name == "shear2d-surfactant") {
            c.eos = "linear";
            c.beta = 0.5;
            c.mu_gamma_bar = c.lambda_gamma_bar = 0.1;
            c.b_mu = c.b_lambda = 100.0;
            c.psi0 = "onesided";
            c.rho_gamma0 = 1.0;
        } else {
            c.eos = "constant";
            c.mu_gamma_bar = c.lambda_gamma_bar = 1.0;
            c.rho_gamma0 = 0.0;
        }
    } else if (name == "rising2d" || name == "rising2d-compare") {
        c.dom_lo_x = 0.0;
        c.dom_hi_x = 1.0;
        c.dom_lo_y = 0.0;
        c.dom_hi_y = 2.0;
        c.sides_free_slip = true;
        c.rho_plus = 1000.0;
        c.rho_minus = 100.0;
        c.mu_plus = 10.0;
        c.mu_minus = 1.0;
        c.gamma_bar = 24.5;
        c.forcing = "gravity";
        c.gravity = 0.98;
        c.eos = "linear";
        c.beta = 0.5;
        c.d_gamma = 0.1;
        c.mu_gamma_bar = c.lambda_gamma_bar = 0.1;
        c.rho_gamma0 = 1.0;
        c.cx = 0.5;
        c.cy = 0.5;
        c.r0 = 0.25;
        c.numdiff = true;
        c.nf = 32;
        c.nc = 4;
        c.kgamma = 64;
        c.tau = 1e-3;
        c.tmax = 3.0;
    } else if (name == "ellipse-relax") {
        c.dom_lo_x = c.dom_lo_y = -1.0;
        c.dom_hi_x = c.dom_hi_y = 1.0;
        c.rho_plus = c.rho_minus = 1.0;
        c.mu_plus = c.mu_minus = 1.0;
        c.gamma_bar = 1.0;
        c.eos = "constant";
        c.mu_gamma_bar = c.lambda_gamma_bar = 0.1;
        c.rho_gamma0 = 0.0;
        c.initial_shape = "ellipse";
        c.ell_a = 0.5;
        c.ell_b = 0.28;
        c.nf = 32;
        c.nc = 4;
        c.kgamma = 64;
        c.tau = 1e-3;
        c.tmax = 0.5;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return c;
}

SimulationState build_simulation(const ExperimentConfig& cfg) {
    cfg.validate();
    return SimulationState::create(cfg.scheme_enum(), cfg.physical(), cfg.domain(), cfg.nf,
                                   cfg.nc, cfg.tau, cfg.xfem, cfg.initial(),
                                   cfg.boundary_field());
}

} // namespace bsflow
