#pragma once

#include "bsflow/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bsflow {

struct RunResult {
    int steps = 0;
    int exit_code = 0; // 0 ok, 2 geometric failure, 3 solver failure
    std::string failure;
    DiagnosticsRecord final_diag;
    double max_rho_drift = 0.0; // max per-step relative drift of <rho_Gamma,1>
    double max_psi_drift = 0.0; // same for <Psi,1>
    double area_drift = 0.0;    // |area(T) - area(0)| / area(0)
    std::optional<ErrorNorms> errors;
    std::vector<DiagnosticsRecord> history;
};

/// Runs one experiment and writes diagnostics.csv, interface snapshots
/// (CSV + legacy VTK), bulk mesh snapshots, summary.json and the SVG plots
/// into cfg.out. Failures keep the partial outputs and a failure record.
RunResult run_experiment(const ExperimentConfig& cfg);

/// One row per (1/h, tau) of the expanding-bubble study; returns the CSV
/// text (also written to <out>/convergence.csv).
std::string convergence_study(const ExperimentConfig& base,
                              const std::vector<std::pair<int, double>>& rows);

// --- output writers -------------------------------------------------------

void write_interface_csv(const std::string& path, const InterfacePolygon& poly);
void write_interface_vtk(const std::string& path, const InterfacePolygon& poly,
                         const SurfaceField& rho_gamma, const SurfaceField& psi);
void write_mesh_vtk(const std::string& path, const BulkMesh& mesh,
                    const ElementClassification& cls, const Eigen::VectorXd& rho);
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& recs);

struct SvgPolyline {
    std::vector<Vec2> points;
    std::string color = "#000000";
    bool closed = true;
    std::string label;
};
/// Self-contained SVG with equal-aspect world coordinates.
void write_svg_overlay(const std::string& path, const std::vector<SvgPolyline>& lines);
/// Simple x/y series plot (energy over time and friends).
void write_svg_series(const std::string& path, const std::vector<double>& x,
                      const std::vector<std::vector<double>>& ys,
                      const std::vector<std::string>& labels);

} // namespace bsflow
