#include "bsflow/harness.hpp"

#include "bsflow/errors.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace bsflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file: " + path);
    return os;
}

std::string snapshot_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%08.4f", t);
    std::string s = buf;
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

const char* overlay_color(size_t i) {
    static const char* colors[] = {"#1f3b73", "#2e7d52", "#b5541c", "#7a2f8f",
                                   "#a01b3c", "#11707e", "#6b6b12", "#333333"};
    return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

} // namespace

void write_interface_csv(const std::string& path, const InterfacePolygon& poly) {
    auto os = open_out(path);
    os << "x,y\n";
    for (const auto& q : poly.vertices()) os << fmt(q.x()) << "," << fmt(q.y()) << "\n";
}

void write_interface_vtk(const std::string& path, const InterfacePolygon& poly,
                         const SurfaceField& rho_gamma, const SurfaceField& psi) {
    auto os = open_out(path);
    const int K = poly.num_vertices();
    os << "# vtk DataFile Version 3.0\ninterface\nASCII\nDATASET POLYDATA\n";
    os << "POINTS " << K << " double\n";
    for (const auto& q : poly.vertices()) os << fmt(q.x()) << " " << fmt(q.y()) << " 0\n";
    os << "LINES 1 " << K + 2 << "\n" << K + 1;
    for (int k = 0; k < K; ++k) os << " " << k;
    os << " 0\n";
    os << "POINT_DATA " << K << "\n";
    os << "SCALARS rho_gamma double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < K; ++k) os << fmt(rho_gamma[k]) << "\n";
    os << "SCALARS psi double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < K; ++k) os << fmt(psi[k]) << "\n";
}

void write_mesh_vtk(const std::string& path, const BulkMesh& mesh,
                    const ElementClassification& cls, const Eigen::VectorXd& rho) {
    auto os = open_out(path);
    os << "# vtk DataFile Version 3.0\nbulk mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    for (int i = 0; i < mesh.num_vertices(); ++i)
        os << fmt(mesh.vertex(i).x()) << " " << fmt(mesh.vertex(i).y()) << " 0\n";
    os << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
    for (int t = 0; t < mesh.num_triangles(); ++t)
        os << "3 " << mesh.tri(t)[0] << " " << mesh.tri(t)[1] << " " << mesh.tri(t)[2] << "\n";
    os << "CELL_TYPES " << mesh.num_triangles() << "\n";
    for (int t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
    os << "CELL_DATA " << mesh.num_triangles() << "\n";
    os << "SCALARS label int 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < mesh.num_triangles(); ++t) os << static_cast<int>(cls.label[t]) << "\n";
    os << "SCALARS rho double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < mesh.num_triangles(); ++t) os << fmt(rho[t]) << "\n";
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& recs) {
    auto os = open_out(path);
    os << "t,kinetic,surface_kinetic,interface_energy,total_psi,total_rho_gamma,"
          "enclosed_area,min_psi,max_psi,min_rho_gamma,max_rho_gamma,edge_ratio,"
          "bulk_dissipation\n";
    for (const auto& d : recs) {
        os << fmt(d.t) << "," << fmt(d.kinetic) << "," << fmt(d.surface_kinetic) << ","
           << fmt(d.interface_energy) << "," << fmt(d.total_psi) << ","
           << fmt(d.total_rho_gamma) << "," << fmt(d.enclosed_area) << "," << fmt(d.min_psi)
           << "," << fmt(d.max_psi) << "," << fmt(d.min_rho_gamma) << ","
           << fmt(d.max_rho_gamma) << "," << fmt(d.edge_ratio) << ","
           << fmt(d.bulk_dissipation) << "\n";
    }
}

void write_svg_overlay(const std::string& path, const std::vector<SvgPolyline>& lines) {
    Vec2 lo(1e300, 1e300), hi(-1e300, -1e300);
    for (const auto& l : lines)
        for (const auto& p : l.points) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    if (lines.empty()) {
        lo = Vec2(0, 0);
        hi = Vec2(1, 1);
    }
    const double pad = 0.05 * (hi - lo).norm() + 1e-12;
    lo -= Vec2(pad, pad);
    hi += Vec2(pad, pad);
    const double W = 640.0;
    const double scale = W / std::max(hi.x() - lo.x(), hi.y() - lo.y());
    const double H = (hi.y() - lo.y()) * scale;
    auto mapx = [&](double x) { return (x - lo.x()) * scale; };
    auto mapy = [&](double y) { return H - (y - lo.y()) * scale; };

    auto os = open_out(path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    double ly = 16.0;
    for (const auto& l : lines) {
        os << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.2\" points=\"";
        for (const auto& p : l.points) os << mapx(p.x()) << "," << mapy(p.y()) << " ";
        if (l.closed && !l.points.empty())
            os << mapx(l.points.front().x()) << "," << mapy(l.points.front().y());
        os << "\"/>\n";
        if (!l.label.empty()) {
            os << "<text x=\"8\" y=\"" << ly << "\" font-size=\"12\" fill=\"" << l.color << "\">"
               << l.label << "</text>\n";
            ly += 16.0;
        }
    }
    os << "</svg>\n";
}

void write_svg_series(const std::string& path, const std::vector<double>& x,
                      const std::vector<std::vector<double>>& ys,
                      const std::vector<std::string>& labels) {
    const double W = 720.0, H = 420.0, ml = 60.0, mb = 40.0, mt = 20.0, mr = 20.0;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!x.empty()) {
        xmin = *std::min_element(x.begin(), x.end());
        xmax = *std::max_element(x.begin(), x.end());
        ymin = 1e300;
        ymax = -1e300;
        for (const auto& y : ys)
            for (double v : y) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto mapx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto mapy = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mb - mt); };

    auto os = open_out(path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
       << H - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << ml << "\" y2=\"" << mt
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ml << "\" y=\"" << H - mb + 24 << "\" font-size=\"11\">" << fmt(xmin)
       << "</text>\n";
    os << "<text x=\"" << W - mr - 40 << "\" y=\"" << H - mb + 24 << "\" font-size=\"11\">"
       << fmt(xmax) << "</text>\n";
    os << "<text x=\"4\" y=\"" << H - mb << "\" font-size=\"11\">" << fmt(ymin) << "</text>\n";
    os << "<text x=\"4\" y=\"" << mt + 8 << "\" font-size=\"11\">" << fmt(ymax) << "</text>\n";
    for (size_t s = 0; s < ys.size(); ++s) {
        os << "<polyline fill=\"none\" stroke=\"" << overlay_color(s)
           << "\" stroke-width=\"1.2\" points=\"";
        for (size_t i = 0; i < x.size() && i < ys[s].size(); ++i)
            os << mapx(x[i]) << "," << mapy(ys[s][i]) << " ";
        os << "\"/>\n";
        if (s < labels.size())
            os << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 14 + 16.0 * s
               << "\" font-size=\"12\" fill=\"" << overlay_color(s) << "\">" << labels[s]
               << "</text>\n";
    }
    os << "</svg>\n";
}

namespace {

RunResult run_single(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out);
    {
        auto os = open_out(cfg.out + "/config.json");
        os << cfg.to_json() << "\n";
    }
    RunResult res;
    std::vector<SvgPolyline> overlay;
    std::optional<ErrorAccumulator> errors;
    if (const auto exact = cfg.exact())
        errors.emplace(*exact, cfg.domain(), cfg.tau);

    SimulationState sim = build_simulation(cfg);
    const int n_steps = static_cast<int>(std::llround(cfg.tmax / cfg.tau));
    DiagnosticsRecord d0 = sim.diagnostics();
    res.history.push_back(d0);
    overlay.push_back({sim.interface().vertices(), overlay_color(0), true, "t=" + fmt(0.0)});
    write_interface_csv(cfg.out + "/interface_t" + snapshot_tag(0.0) + ".csv", sim.interface());
    write_interface_vtk(cfg.out + "/interface_t" + snapshot_tag(0.0) + ".vtk", sim.interface(),
                        sim.rho_gamma(), sim.psi());
    write_mesh_vtk(cfg.out + "/mesh_t" + snapshot_tag(0.0) + ".vtk", sim.mesh(),
                   sim.classification(), Eigen::VectorXd::Zero(sim.mesh().num_triangles()));

    try {
        for (int m = 0; m < n_steps; ++m) {
            const double rho_before = res.history.back().total_rho_gamma;
            const double psi_before = res.history.back().total_psi;
            sim.step();
            const DiagnosticsRecord d = sim.diagnostics();
            res.history.push_back(d);
            res.max_rho_drift =
                std::max(res.max_rho_drift, std::abs(d.total_rho_gamma - rho_before) /
                                                std::max(1e-300, std::abs(rho_before)));
            res.max_psi_drift =
                std::max(res.max_psi_drift,
                         std::abs(d.total_psi - psi_before) / std::max(1e-300, std::abs(psi_before)));
            if (errors) errors->observe(sim);
            const bool snap = (cfg.cadence > 0 && (m + 1) % cfg.cadence == 0) || m + 1 == n_steps;
            if (snap) {
                const std::string tag = snapshot_tag(sim.time());
                write_interface_csv(cfg.out + "/interface_t" + tag + ".csv", sim.interface());
                write_interface_vtk(cfg.out + "/interface_t" + tag + ".vtk", sim.interface(),
                                    sim.rho_gamma(), sim.psi());
                Eigen::VectorXd rho, mu;
                piecewise_coefficients(sim.mesh(), sim.classification(), sim.params(), rho, mu);
                write_mesh_vtk(cfg.out + "/mesh_t" + tag + ".vtk", sim.mesh(),
                               sim.classification(), rho);
                overlay.push_back({sim.interface().vertices(), overlay_color(overlay.size()),
                                   true, "t=" + fmt(sim.time())});
            }
            res.steps = m + 1;
        }
    } catch (const GeometricError& e) {
        res.exit_code = 2;
        res.failure = e.what();
    } catch (const SolverError& e) {
        res.exit_code = 3;
        res.failure = e.what();
    }

    res.final_diag = res.history.back();
    res.area_drift = std::abs(res.final_diag.enclosed_area - res.history.front().enclosed_area) /
                     res.history.front().enclosed_area;
    if (errors && res.exit_code == 0) res.errors = errors->finalize();

    write_diagnostics_csv(cfg.out + "/diagnostics.csv", res.history);
    write_svg_overlay(cfg.out + "/interfaces.svg", overlay);
    {
        std::vector<double> t;
        std::vector<double> e_total, e_kin;
        for (const auto& d : res.history) {
            t.push_back(d.t);
            e_kin.push_back(d.kinetic + d.surface_kinetic);
            e_total.push_back(d.kinetic + d.surface_kinetic + d.interface_energy);
        }
        write_svg_series(cfg.out + "/energy.svg", t, {e_total, e_kin}, {"total", "kinetic"});
    }
    json summary;
    summary["steps"] = res.steps;
    summary["failed"] = res.exit_code != 0;
    summary["failure"] = res.failure;
    summary["exit_code"] = res.exit_code;
    summary["max_rho_gamma_drift"] = res.max_rho_drift;
    summary["max_psi_drift"] = res.max_psi_drift;
    summary["area_drift"] = res.area_drift;
    summary["final_t"] = res.final_diag.t;
    summary["final_edge_ratio"] = res.final_diag.edge_ratio;
    summary["final_enclosed_area"] = res.final_diag.enclosed_area;
    if (res.errors) {
        summary["x_err"] = res.errors->x_err;
        summary["u_err"] = res.errors->u_err;
        summary["pc_err"] = res.errors->pc_err;
        summary["theta_err"] = res.errors->theta_err;
    }
    auto os = open_out(cfg.out + "/summary.json");
    os << summary.dump(2) << "\n";
    return res;
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.preset == "rising2d-compare") {
        // one invocation emits both schemes' mesh-quality series
        ExperimentConfig gd = cfg;
        gd.preset = "rising2d";
        gd.scheme = "gd";
        gd.out = cfg.out + "/gd";
        ExperimentConfig bgn = cfg;
        bgn.preset = "rising2d";
        bgn.scheme = "bgn";
        bgn.out = cfg.out + "/bgn";
        const RunResult rgd = run_single(gd);
        const RunResult rbgn = run_single(bgn);
        auto os = open_out(cfg.out + "/edge_ratio.csv");
        os << "t,gd,bgn\n";
        const size_t n = std::min(rgd.history.size(), rbgn.history.size());
        for (size_t i = 0; i < n; ++i)
            os << fmt(rbgn.history[i].t) << "," << fmt(rgd.history[i].edge_ratio) << ","
               << fmt(rbgn.history[i].edge_ratio) << "\n";
        RunResult combined = rbgn;
        combined.exit_code = std::max(rgd.exit_code, rbgn.exit_code);
        return combined;
    }
    return run_single(cfg);
}

std::string convergence_study(const ExperimentConfig& base,
                              const std::vector<std::pair<int, double>>& rows) {
    std::string csv = "inv_h,tau,x_err,u_err,pc_err,theta_err\n";
    for (const auto& [inv_h, tau] : rows) {
        ExperimentConfig cfg = base;
        const double extent = cfg.domain().min_extent();
        cfg.nf = cfg.nc = static_cast<int>(std::lround(extent * inv_h));
        cfg.kgamma = std::max(3, static_cast<int>(std::lround(2.0 * M_PI * cfg.r0 * 3 * inv_h)));
        cfg.tau = tau;
        cfg.out = base.out + "/row_h" + std::to_string(inv_h);
        const RunResult r = run_experiment(cfg);
        if (r.exit_code != 0)
            throw SolverError("convergence row failed: " + r.failure);
        if (!r.errors) throw ConfigError("convergence study needs the exact solution");
        csv += std::to_string(inv_h) + "," + fmt(tau) + "," + fmt(r.errors->x_err) + "," +
               fmt(r.errors->u_err) + "," + fmt(r.errors->pc_err) + "," +
               fmt(r.errors->theta_err) + "\n";
    }
    auto os = open_out(base.out + "/convergence.csv");
    os << csv;
    return csv;
}

} // namespace bsflow
