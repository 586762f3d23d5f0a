#pragma once

#include "bsflow/fem_spaces.hpp"
#include "bsflow/surface_calculus.hpp"

#include <Eigen/Sparse>

namespace bsflow {

/// GD transports interface vertices with the fluid velocity (vector
/// curvature); BGN lets the curvature equation pick the tangential motion
/// (scalar curvature, equidistributing).
enum class Scheme { GD, BGN };

/// Index layout of the coupled system for (U, P, X, kappa). Column blocks
/// are the unknowns; the interface row blocks differ in size between the
/// schemes (BGN has K scalar motion rows, GD has 2K).
struct SystemLayout {
    int n_u = 0;
    int n_p = 0;
    int n_x = 0;      // 2K
    int n_k = 0;      // 2K for GD, K for BGN
    int rows_motion = 0; // 2K for GD, K for BGN
    int rows_curv = 0;   // 2K

    int col_u(int i) const { return i; }
    int col_p(int i) const { return n_u + i; }
    int col_x(int i) const { return n_u + n_p + i; }
    int col_k(int i) const { return n_u + n_p + n_x + i; }
    int row_mom(int i) const { return i; }
    int row_cont(int i) const { return n_u + i; }
    int row_motion(int i) const { return n_u + n_p + i; }
    int row_curv(int i) const { return n_u + n_p + rows_motion + i; }
    int total() const { return n_u + n_p + n_x + n_k; }
};

/// One time level's coupled linear system, kept as triplets until the solve.
struct BlockSystem {
    Scheme scheme = Scheme::BGN;
    SystemLayout layout;
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs;
    /// Convection entries are also mirrored here so the antisymmetry of the
    /// the block can be checked in isolation.
    std::vector<Eigen::Triplet<double>> convection;
    /// Dirichlet/free-slip constraints: velocity dof -> imposed value.
    std::vector<std::pair<int, double>> constraints;
    /// Pressure nullspace directions and mean weights, in full indexing.
    std::vector<Eigen::VectorXd> nullspace;
    std::vector<Eigen::VectorXd> mean_weights;

    void init(Scheme s, int n_u, int n_p, int K);
    void add(int row, int col, double v) { triplets.emplace_back(row, col, v); }
};

/// Everything one fully discrete step reads. Previous-level quantities come
/// interpolated/projected onto the current mesh where the schemes say so.
struct StepInputs {
    Scheme scheme = Scheme::BGN;
    double tau = 1e-3;
    double t_next = 0.0;
    const PhysicalParams* params = nullptr;

    const BulkMesh* mesh = nullptr; // T^m
    const ElementClassification* cls = nullptr;
    const Eigen::VectorXd* rho_m = nullptr; // elementwise density at level m
    const Eigen::VectorXd* mu_m = nullptr;
    const Eigen::VectorXd* rho_old = nullptr; // projected level m-1 density
    const P2Space* vel = nullptr;
    const PressureSpace* pres = nullptr;

    const InterfacePolygon* gamma = nullptr;      // Gamma^m
    const InterfacePolygon* gamma_prev = nullptr; // Gamma^{m-1}
    const SurfaceField* rho_gamma = nullptr;      // on Gamma^m
    const SurfaceField* rho_gamma_prev = nullptr; // on Gamma^{m-1}
    const SurfaceField* psi = nullptr;            // Psi^m
    /// kappa^m: 2K values (vector, GD) or K values (scalar, BGN)
    const Eigen::VectorXd* kappa = nullptr;

    Eigen::VectorXd u_interp;      // I^m_2 U^m
    Eigen::VectorXd u_prev_interp; // I^m_2 U^{m-1}

    std::vector<BulkMesh::Location> loc_gamma;      // vertex cache, level m
    std::vector<BulkMesh::Location> loc_gamma_prev; // vertex cache, level m-1

    void cache_locations();
};

/// Bulk Navier-Stokes blocks: time-weighted mass, viscous stress,
/// antisymmetrized convection, pressure-divergence coupling (incl. the
/// enrichment column), body force and old-momentum right hand sides.
void assemble_bulk_ns(const StepInputs& in, BlockSystem& sys);

/// Surface Boussinesq-Scriven block scattered onto the velocity space.
void assemble_surface_viscosity(const StepInputs& in, BlockSystem& sys);

enum class CrossLevel { Current, Previous };

/// Lumped interface mass of the surface material density against the
/// velocity space: matrix at the current level, right hand side from the
/// previous level (the pulled-back test evaluation).
void assemble_rho_cross_mass(const StepInputs& in, BlockSystem& sys, CrossLevel level);

/// Transport correction of the equidistributing scheme: the known slip
/// velocity contracted against the Xi matrices on the previous interface.
void assemble_xi_cross(const StepInputs& in, BlockSystem& sys);

/// Curvature/position equations, their couplings to the velocity space and
/// the explicit surface-tension right hand sides.
void assemble_curvature_coupling(const StepInputs& in, BlockSystem& sys);

/// Inhomogeneous Dirichlet data: fills the constraint list from the nodal
/// interpolant of g and distributes the compatibility right hand side of the
/// continuity rows. Free-slip components are constrained to zero.
void apply_dirichlet(const StepInputs& in, BlockSystem& sys,
                     const std::function<Vec2(const Vec2&)>& g);

/// Boundary flux of the nodal interpolant of g over the Dirichlet part.
double boundary_flux(const P2Space& vel, const Eigen::VectorXd& g_nodal);

struct InterfaceFieldSystems {
    Eigen::SparseMatrix<double> rho_matrix;
    Eigen::VectorXd rho_rhs;
    Eigen::SparseMatrix<double> psi_matrix;
    Eigen::VectorXd psi_rhs;
};

/// The two decoupled SPD systems for the new surface density and surfactant.
/// `transport` holds (X^{m+1}-id)/tau - U^{m+1} at the old vertices (BGN;
/// ignored for GD). Numerical diffusion enters the density system when
/// params.numdiff_slope > 0.
InterfaceFieldSystems assemble_interface_fields(const InterfacePolygon& gamma_old,
                                                const InterfacePolygon& gamma_new, double tau,
                                                const std::vector<Vec2>& transport,
                                                const SurfaceField& rho_old,
                                                const SurfaceField& psi_old,
                                                const PhysicalParams& params, Scheme scheme);

/// Nodal discrete curvature vector at level 0 for the GD scheme (the
/// lumped-mass solve of the curvature equation with X = id).
Eigen::VectorXd initial_curvature_gd(const InterfacePolygon& poly);

} // namespace bsflow
