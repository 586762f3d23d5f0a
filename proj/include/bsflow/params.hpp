#pragma once

#include "bsflow/geometry.hpp"

#include <functional>
#include <limits>

namespace bsflow {

enum class EosKind { Linear, Langmuir, Constant };

/// Surface tension gamma(r), surface energy F(r) and their regularized
/// variants. Linear: gamma = gbar*(1 - beta*r) with psi_infinity = inf.
/// Langmuir: gamma = gbar*[1 + beta*psi_inf*ln(1 - r/psi_inf)].
/// Constant is the beta = 0 degeneration where F = gamma = gbar.
struct EquationOfState {
    EosKind kind = EosKind::Constant;
    double gamma_bar = 1.0;
    double beta = 0.0;
    double psi_infinity = std::numeric_limits<double>::infinity();

    double gamma(double r) const;
    double F(double r) const;
    double Fprime(double r) const;  // singular at r = 0 for beta > 0
    double Fsecond(double r) const;

    // quadratic extension below eps; identical to the plain values for r >= eps
    double f_eps(double eps, double r) const;
    double gamma_eps(double eps, double r) const;
    double fprime_eps(double eps, double r) const;

    void validate() const;

private:
    void check_domain(double r) const;
};

/// Edge value used by the surfactant transport of the equidistributing
/// scheme; reduces to the logarithmic mean for the linear equation of state.
double psi_star_eps(const EquationOfState& eos, double eps, double a, double b);

/// All material and model constants of a run.
struct PhysicalParams {
    double rho_plus = 1.0;
    double rho_minus = 1.0;
    double mu_plus = 1.0;
    double mu_minus = 1.0;

    double gamma_bar = 1.0;
    double beta = 0.0;
    double psi_infinity = std::numeric_limits<double>::infinity();
    EosKind eos_kind = EosKind::Constant;

    double d_gamma = 0.0;        // surfactant diffusivity
    double mu_gamma_bar = 0.0;   // surface shear viscosity at r = 0
    double lambda_gamma_bar = 0.0;
    double b_mu = 0.0;           // linear surfactant dependence slopes
    double b_lambda = 0.0;

    double epsilon_reg = 1e-8;
    double numdiff_slope = 0.0;  // vartheta(s) = numdiff_slope * s

    using ForceField = std::function<Vec2(const Vec2&, double)>;
    ForceField gravity_force;    // f1 (multiplied by the bulk density)
    ForceField extra_force;      // f2

    EquationOfState eos() const { return {eos_kind, gamma_bar, beta, psi_infinity}; }

    double mu_gamma_of(double r) const { return mu_gamma_bar * (1.0 + b_mu * std::max(0.0, r)); }
    double lambda_gamma_of(double r) const {
        return lambda_gamma_bar * (1.0 + b_lambda * std::max(0.0, r));
    }
    double theta_diffusion(double s) const { return numdiff_slope * s; }

    Vec2 f1(const Vec2& z, double t) const { return gravity_force ? gravity_force(z, t) : Vec2::Zero(); }
    Vec2 f2(const Vec2& z, double t) const { return extra_force ? extra_force(z, t) : Vec2::Zero(); }

    void validate() const;
};

} // namespace bsflow
