#pragma once

#include "bsflow/exact_solutions.hpp"
#include "bsflow/timestepper.hpp"

#include <optional>
#include <string>

namespace bsflow {

/// Flat run description; serializes to/from JSON with a schema version.
/// Physical symbols follow the usual naming (rho_plus, mu_gamma_bar, ...).
struct ExperimentConfig {
    int schema_version = 1;
    std::string preset;      // provenance; empty for hand-written configs
    std::string scheme = "bgn";
    int nf = 32;             // fine subdivision (h_f = min extent / nf)
    int nc = 4;              // coarse subdivision
    int kgamma = 64;         // interface vertex count
    double tau = 1e-3;
    double tmax = 1.0;
    bool xfem = true;
    bool numdiff = false;    // vartheta(s) = s/20 when on
    std::string eos = "constant"; // constant | linear | langmuir
    std::string out = "out";
    int cadence = 0;         // snapshot every N steps (0: only initial/final)

    double rho_plus = 1.0, rho_minus = 1.0;
    double mu_plus = 1.0, mu_minus = 1.0;
    double gamma_bar = 1.0, beta = 0.0;
    double psi_infinity = 0.0; // 0 encodes infinity
    double d_gamma = 0.0;
    double mu_gamma_bar = 0.0, lambda_gamma_bar = 0.0;
    double b_mu = 0.0, b_lambda = 0.0;
    double epsilon_reg = 1e-8;

    double dom_lo_x = -1, dom_lo_y = -1, dom_hi_x = 1, dom_hi_y = 1;
    bool hole = false;
    double hole_lo_x = 0, hole_lo_y = 0, hole_hi_x = 0, hole_hi_y = 0;
    bool sides_free_slip = false;

    std::string initial_shape = "circle"; // circle | ellipse
    double cx = 0.0, cy = 0.0;
    double r0 = 0.5;
    double ell_a = 0.5, ell_b = 0.3;

    std::string velocity_bc = "none"; // none | shear | expanding
    std::string forcing = "none";     // none | gravity | expanding
    double gravity = 0.0;             // f1 = -gravity e_2
    double alpha = 0.15;              // expansion rate

    std::string psi0 = "one";   // one | onesided  (1e-6 + [z1]_+)
    double rho_gamma0 = 1.0;
    double u0_scale = 1.0;      // premultiplies the boundary-field initial velocity
    bool u0_from_bc = false;    // start from the boundary field instead of rest

    void validate() const;
    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);

    Scheme scheme_enum() const;
    Domain domain() const;
    PhysicalParams physical() const;
    InitialData initial() const;
    std::function<Vec2(const Vec2&, double)> boundary_field() const;
    std::optional<ExpandingBubbleParams> exact() const; // set for the expanding family
};

/// Named experiment presets mirroring the shear-flow, rising-bubble,
/// relaxation and expanding-bubble setups.
ExperimentConfig preset(const std::string& name);

SimulationState build_simulation(const ExperimentConfig& cfg);

} // namespace bsflow
