#include "bsflow/params.hpp"

#include "bsflow/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace bsflow {

void EquationOfState::check_domain(double r) const {
    if (kind == EosKind::Langmuir && r >= psi_infinity)
        throw std::domain_error("Langmuir equation of state requires r < psi_infinity");
}

double EquationOfState::gamma(double r) const {
    check_domain(r);
    switch (kind) {
    case EosKind::Linear: return gamma_bar * (1.0 - beta * r);
    case EosKind::Langmuir:
        return gamma_bar * (1.0 + beta * psi_infinity * std::log1p(-r / psi_infinity));
    case EosKind::Constant: return gamma_bar;
    }
    return gamma_bar;
}

double EquationOfState::F(double r) const {
    check_domain(r);
    switch (kind) {
    case EosKind::Linear:
        if (r == 0.0) return gamma_bar; // r*ln r -> 0
        return gamma_bar * (1.0 + beta * r * (std::log(r) - 1.0));
    case EosKind::Langmuir: {
        if (r == 0.0) return gamma_bar;
        const double pi = psi_infinity;
        return gamma_bar *
               (1.0 + beta * (r * std::log(r / (pi - r)) + pi * std::log((pi - r) / pi)));
    }
    case EosKind::Constant: return gamma_bar;
    }
    return gamma_bar;
}

double EquationOfState::Fprime(double r) const {
    check_domain(r);
    switch (kind) {
    case EosKind::Linear: return gamma_bar * beta * std::log(r);
    case EosKind::Langmuir: return gamma_bar * beta * std::log(r / (psi_infinity - r));
    case EosKind::Constant: return 0.0;
    }
    return 0.0;
}

double EquationOfState::Fsecond(double r) const {
    check_domain(r);
    switch (kind) {
    case EosKind::Linear: return gamma_bar * beta / r;
    case EosKind::Langmuir: return gamma_bar * beta * psi_infinity / (r * (psi_infinity - r));
    case EosKind::Constant: return 0.0;
    }
    return 0.0;
}

double EquationOfState::f_eps(double eps, double r) const {
    check_domain(r);
    if (r >= eps) return F(r);
    const double d = r - eps;
    return F(eps) + Fprime(eps) * d + 0.5 * Fsecond(eps) * d * d;
}

double EquationOfState::gamma_eps(double eps, double r) const {
    check_domain(r);
    if (r >= eps) return gamma(r);
    return gamma(eps) + 0.5 * Fsecond(eps) * (eps * eps - r * r);
}

double EquationOfState::fprime_eps(double eps, double r) const {
    check_domain(r);
    if (r >= eps) return Fprime(r);
    return Fprime(eps) + Fsecond(eps) * (r - eps);
}

void EquationOfState::validate() const {
    // gamma_bar = 0 is admitted so the homogeneous test states stay constructible
    if (gamma_bar < 0.0) throw ConfigError("gamma_bar must be nonnegative");
    if (beta < 0.0) throw ConfigError("beta must be nonnegative");
    if (psi_infinity <= 0.0) throw ConfigError("psi_infinity must be positive");
    if (kind == EosKind::Langmuir && !std::isfinite(psi_infinity))
        throw ConfigError("Langmuir equation of state needs a finite psi_infinity");
}

double psi_star_eps(const EquationOfState& eos, double eps, double a, double b) {
    const double fa = eos.fprime_eps(eps, a);
    const double fb = eos.fprime_eps(eps, b);
    if (std::abs(fb - fa) <= 1e-14 * std::max(1.0, std::abs(fa))) return 0.5 * (a + b);
    return -(eos.gamma_eps(eps, b) - eos.gamma_eps(eps, a)) / (fb - fa);
}

void PhysicalParams::validate() const {
    // rho = 0 is a supported degeneration (generalized Stokes)
    if (rho_plus < 0.0 || rho_minus < 0.0 || mu_plus <= 0.0 || mu_minus <= 0.0)
        throw ConfigError("bulk densities must be nonnegative, viscosities positive");
    if (mu_gamma_bar < 0.0) throw ConfigError("mu_gamma_bar must be nonnegative");
    if (lambda_gamma_bar + 2.0 * mu_gamma_bar < 0.0)
        throw ConfigError("need lambda_gamma_bar + 2*mu_gamma_bar >= 0 for d=2");
    if (d_gamma < 0.0) throw ConfigError("d_gamma must be nonnegative");
    if (epsilon_reg <= 0.0) throw ConfigError("epsilon_reg must be positive");
    eos().validate();
}

} // namespace bsflow
