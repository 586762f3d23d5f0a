#pragma once

#include "bsflow/timestepper.hpp"

namespace bsflow {

/// Radially expanding bubble driven by inflow through the inner boundary of
/// an annular box; exact solution of the full interface model for
/// constant surface tension and constant surface viscosities.
struct ExpandingBubbleParams {
    double alpha = 0.15;
    double r0 = 0.5;
    double rho_gamma0_bar = 1.0;
    double gamma_bar = 1.0;
    double mu_gamma_bar = 1.0;
    double lambda_gamma_bar = 1.0;
    double mu_plus = 1.0;
    double mu_minus = 1.0;
};

struct ExactBubbleState {
    double r = 0.0;        // interface radius
    Vec2 u = Vec2::Zero(); // velocity
    double p = 0.0;        // pressure (mean-zero over Omega)
    double rho_gamma = 0.0;
    double theta = 0.0; // pressure jump coefficient
    Vec2 f1 = Vec2::Zero();
    Vec2 g = Vec2::Zero(); // Dirichlet data
};

double exact_radius(const ExpandingBubbleParams& p, double t);
double exact_theta(const ExpandingBubbleParams& p, double t);
/// Throws GeometricError at the origin.
ExactBubbleState exact_state(const ExpandingBubbleParams& p, double t, const Vec2& z,
                             const Domain& domain);

struct ErrorNorms {
    double x_err = 0.0;     // max vertex distance to the exact circle over all levels
    double u_err = 0.0;     // max nodal velocity error over all levels
    double pc_err = 0.0;    // l2-in-time L2 norm of the jump-free pressure error
    double theta_err = 0.0; // l2-in-time error of the enrichment coefficient
};

/// Accumulates the four error norms over a run; feed it the state right
/// after every step. Pressure errors need the enrichment coefficient.
class ErrorAccumulator {
public:
    ErrorAccumulator(const ExpandingBubbleParams& p, const Domain& domain, double tau)
        : p_(p), domain_(domain), tau_(tau) {}

    void observe(const SimulationState& state);
    void observe(const InterfacePolygon& gamma, const VelocitySnapshot& velocity,
                 const PressureSnapshot& pressure, double t);
    ErrorNorms finalize() const;
    int observed_steps() const { return steps_; }

private:
    ExpandingBubbleParams p_;
    Domain domain_;
    double tau_;
    int steps_ = 0;
    ErrorNorms acc_;       // x_err/u_err as maxima, pc/theta as running sums
};

} // namespace bsflow
