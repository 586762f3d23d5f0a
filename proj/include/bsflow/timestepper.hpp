#pragma once

#include "bsflow/assembly.hpp"
#include "bsflow/linear_solver.hpp"

#include <memory>
#include <optional>
#include <string>

namespace bsflow {

struct VelocitySnapshot {
    std::shared_ptr<const BulkMesh> mesh;
    std::shared_ptr<const P2Space> space;
    Eigen::VectorXd coef;

    Vec2 eval(const Vec2& p, int hint = -1) const { return space->evaluate(coef, p, hint); }
};

struct PressureSnapshot {
    std::shared_ptr<const PressureSpace> space;
    Eigen::VectorXd coef;
    double theta = 0.0; // enrichment coefficient (0 when XFEM is off)
};

/// Per-step balance of the discrete energy inequality and solver bookkeeping.
struct StepReport {
    double residual = 0.0;
    double energy_old = 0.0;   // E(I0 rho^{m-1}, I2 U^m, Gamma^m)
    double energy_new = 0.0;   // E(rho^m, U^{m+1}, Gamma^{m+1})
    double dissipation = 0.0;  // time-weighted bulk + surface viscous terms
    double bulk_dissipation = 0.0;
    double psi_transport_row_sum = 0.0; // conservation audit of the transport rhs
};

struct DiagnosticsRecord {
    double t = 0.0;
    double kinetic = 0.0;
    double surface_kinetic = 0.0;
    double interface_energy = 0.0; // <F_eps(Psi),1>^h
    double total_psi = 0.0;
    double total_rho_gamma = 0.0;
    double enclosed_area = 0.0;
    double min_psi = 0.0, max_psi = 0.0;
    double min_rho_gamma = 0.0, max_rho_gamma = 0.0;
    double edge_ratio = 1.0;
    double bulk_dissipation = 0.0; // increment of the step that produced this level
};

struct InitialData {
    InterfacePolygon gamma0;
    std::function<Vec2(const Vec2&)> u0;           // empty = start from rest
    std::function<double(const Vec2&)> psi0;       // empty = 1
    std::function<double(const Vec2&)> rho_gamma0; // empty = 1
    std::optional<double> kappa0_bgn;              // default -1/R for circles
};

class SimulationState {
public:
    static SimulationState create(Scheme scheme, const PhysicalParams& params,
                                  const Domain& domain, int n_fine, int n_coarse, double tau,
                                  bool xfem, const InitialData& initial,
                                  std::function<Vec2(const Vec2&, double)> boundary_g = {});

    /// One fully discrete step: coupled (U,P,X,kappa) solve, interface update,
    /// decoupled density and surfactant solves, mesh re-adaptation.
    StepReport step();

    DiagnosticsRecord diagnostics() const;

    int level() const { return level_; }
    double time() const { return t_; }
    double tau() const { return tau_; }
    Scheme scheme() const { return scheme_; }
    const PhysicalParams& params() const { return params_; }
    PhysicalParams& params() { return params_; }

    const InterfacePolygon& interface() const { return gamma_; }
    const SurfaceField& rho_gamma() const { return rho_gamma_; }
    const SurfaceField& psi() const { return psi_; }
    const Eigen::VectorXd& kappa() const { return kappa_; }
    const BulkMesh& mesh() const { return *mesh_; }
    const ElementClassification& classification() const { return cls_; }
    const VelocitySnapshot& velocity() const { return u_m_; }
    const PressureSnapshot& pressure() const { return pressure_; }
    const StepReport& last_report() const { return report_; }
    bool xfem() const { return xfem_; }

    /// Binary checkpoint. Versioned header with the generation counters and
    /// discretization, then the raw coefficient arrays as little-endian
    /// 64-bit floats; meshes are rebuilt deterministically on load. The
    /// force/boundary closures are code, not state: the caller re-attaches
    /// them through `params` and `boundary_g`.
    void save_checkpoint(const std::string& path) const;
    static SimulationState load_checkpoint(const std::string& path, const PhysicalParams& params,
                                           std::function<Vec2(const Vec2&, double)> boundary_g = {});

private:
    SimulationState() = default;
    void rebuild_bulk(const InterfacePolygon& gamma, bool first);

    Scheme scheme_ = Scheme::BGN;
    PhysicalParams params_;
    Domain domain_;
    int n_fine_ = 1, n_coarse_ = 1;
    double tau_ = 1e-3;
    bool xfem_ = true;
    std::function<Vec2(const Vec2&, double)> boundary_g_;

    int level_ = 0;
    double t_ = 0.0;

    std::shared_ptr<const BulkMesh> mesh_; // T^m
    ElementClassification cls_;
    Eigen::VectorXd rho_m_, mu_m_;
    std::shared_ptr<const P2Space> vel_;

    InterfacePolygon gamma_, gamma_prev_;
    SurfaceField rho_gamma_, rho_gamma_prev_, psi_;
    Eigen::VectorXd kappa_;

    VelocitySnapshot u_m_, u_prev_;
    std::shared_ptr<const BulkMesh> mesh_prev_;
    Eigen::VectorXd rho_prev_;       // elementwise density at level m-1 on mesh_prev_
    std::vector<Vec2> u_prev_adapt_; // interface that u_prev_'s mesh was adapted to

    PressureSnapshot pressure_;
    StepReport report_;
};

} // namespace bsflow
