// Command-line front end: simulate, design, imaging, validate, oracle-run.
// Exit codes: 0 success, 1 validation/runtime failure, 2 bad input.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "backflow/csv_io.hpp"
#include "backflow/report.hpp"
#include "backflow/svg_plot.hpp"
#include "backflow/text_format.hpp"
#include "backflow/validate.hpp"

namespace fs = std::filesystem;
using namespace backflow;

namespace {

Config li7_default_config() {
    Config cfg;
    cfg.set("species", "7Li");
    cfg.set("omega_x", "6.283185307179586");
    cfg.set("omega_perp", "628.3185307179587");
    cfg.set("shift_d", "80e-6");
    cfg.set("expansion_time_t", "1.0");
    cfg.set("sigma_r", "3e-6");
    cfg.set("alpha", "3.0");
    cfg.set("bragg_a2", "0.49");
    cfg.set("bragg_phase", "2.854773");
    cfg.set("regime", "noninteracting");
    return cfg;
}

Scenario build_scenario(const std::string& config_path,
                        const std::vector<std::string>& overrides) {
    Config cfg = config_path.empty() ? li7_default_config() : Config::load(config_path);
    for (const auto& assignment : overrides) cfg.set(assignment);
    Scenario scenario = Scenario::from_config(cfg);
    for (const auto& w : scenario.warnings) std::cerr << "warning: " << w << "\n";
    return scenario;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
}

void write_flux_svg(const fs::path& path, const Scenario& scenario,
                    const FieldProfile& profile, const ProfileSummary& summary) {
    const double center = scenario.packet().center();
    const double half_span = 1.5 * scenario.packet().envelope_width();
    const double um = 1e6 * scenario.scales.a_x;  // a_x -> micrometers

    SvgPlot plot;
    plot.title = "Total current density after the Bragg pulse";
    plot.x_label = "x - x_center (um)";
    plot.y_label = "J (1/s)";
    plot.show_zero_line = true;

    SvgSeries j;
    j.color = "#1f77b4";
    j.label = "J(x)";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double rel = profile.x[i] - center;
        if (std::abs(rel) > half_span) continue;
        j.x.push_back(rel * um);
        j.y.push_back(from_natural(profile.current[i], Quantity::Current, scenario.scales));
    }
    plot.series.push_back(std::move(j));

    for (const auto& w : summary.windows) {
        if (std::abs(w.x_center - center) > half_span) continue;
        SvgBand band;
        band.x0 = (w.x_lo - center) * um;
        band.x1 = (w.x_hi - center) * um;
        plot.bands.push_back(band);
    }
    plot.write(path);
}

void write_density_svg(const fs::path& path, const Scenario& scenario,
                       const FieldProfile& profile, const ProfileSummary& summary) {
    const double center = scenario.packet().center();
    const double half_span = 1.5 * scenario.packet().envelope_width();
    const double um = 1e6 * scenario.scales.a_x;

    SvgPlot plot;
    plot.title = "Density and critical density (normalized to rho_max)";
    plot.x_label = "x - x_center (um)";
    plot.y_label = "rho / rho_max";

    SvgSeries rho, crit;
    rho.color = "#1f77b4";
    rho.label = "rho";
    crit.color = "#d62728";
    crit.dashed = true;
    crit.label = "rho_crit";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double rel = profile.x[i] - center;
        if (std::abs(rel) > half_span) continue;
        rho.x.push_back(rel * um);
        rho.y.push_back(profile.rho[i] / summary.rho_max);
        if (!std::isnan(profile.rho_crit[i])) {
            crit.x.push_back(rel * um);
            crit.y.push_back(profile.rho_crit[i] / summary.rho_max);
        }
    }
    plot.series.push_back(std::move(rho));
    plot.series.push_back(std::move(crit));

    // annotate density minima inside the plotted span
    const WavepacketState packet = scenario.packet();
    const BraggConfig bragg = scenario.bragg();
    for (double xm : density_minima(profile)) {
        if (std::abs(xm - center) > half_span) continue;
        SvgMarker m;
        m.x = (xm - center) * um;
        m.y = total_density(xm, packet, bragg) / summary.rho_max;
        plot.markers.push_back(m);
    }
    plot.write(path);
}

int cmd_simulate(const Scenario& scenario, const fs::path& out_dir, bool with_oracle) {
    fs::create_directories(out_dir);
    const FieldProfile field = profile(scenario.packet(), scenario.bragg(),
                                       ProfileGrid{scenario.grid.n_points,
                                                   scenario.grid.half_widths,
                                                   scenario.grid.auto_refine,
                                                   std::nullopt, std::nullopt});
    const ProfileSummary summary = summarize_profile(scenario, field);
    const DesignReport design = design_report(scenario.design_input(),
                                              scenario.expansion_natural(),
                                              scenario.sigma_r_natural());
    const DetectabilityReport detect =
        assess_detectability(scenario.bragg(), scenario.alpha, scenario.sigma_r_natural());

    std::optional<OracleComparison> oracle_check;
    if (with_oracle) {
        ProtocolOptions opts;
        opts.ground_state.dtau_min = 4e-3;
        oracle_check = compare_protocol_to_analytic(scenario, opts);
    }

    for (const auto& g : design.guards) {
        if (!g.pass) {
            std::cerr << "warning: guard failed (advisory): " << g.name << " -- "
                      << g.detail << "\n";
        }
    }

    write_profile_csv(out_dir / "profile.csv", field, scenario.scales);
    write_flux_svg(out_dir / "flux.svg", scenario, field, summary);
    write_density_svg(out_dir / "density.svg", scenario, field, summary);
    write_text(out_dir / "report.txt",
               render_simulate_report(scenario, summary, design, detect, oracle_check));

    std::cout << "wrote " << (out_dir / "profile.csv").string() << ", flux.svg, density.svg,"
              << " report.txt\n";
    std::cout << "central min rho/rho_max = " << format_general(summary.central_min_norm, 6)
              << ", rho_crit/rho_max at center = "
              << format_general(summary.crit_norm_at_center, 6) << ", backflow windows: "
              << summary.windows.size() << "\n";
    if (oracle_check) {
        std::cout << "oracle cross-check: rho Linf = "
                  << format_general(oracle_check->rho_linf_norm, 4)
                  << ", J Linf = " << format_general(oracle_check->current_linf_norm, 4)
                  << ", continuity = "
                  << format_general(oracle_check->continuity_residual, 4) << "\n";
    }
    return 0;
}

int cmd_design(const Scenario& scenario, const fs::path& out_dir, double alpha_min,
               double alpha_max, int steps) {
    if (!(alpha_min > 0.0) || !(alpha_max >= alpha_min) || steps < 1) {
        throw std::invalid_argument("design: need 0 < alpha-min <= alpha-max and steps >= 1");
    }
    fs::create_directories(out_dir);

    std::vector<DesignSweepRow> rows;
    for (int i = 0; i < steps; ++i) {
        const double alpha =
            steps == 1 ? alpha_min
                       : alpha_min + (alpha_max - alpha_min) * i / (steps - 1.0);
        DesignInput input = scenario.design_input();
        input.alpha = alpha;
        const DesignReport rep = design_report(input, scenario.expansion_natural(),
                                               scenario.sigma_r_natural());
        DesignSweepRow row;
        row.alpha = alpha;
        row.a2_opt = rep.a2_opt;
        row.f_min = rep.f_min;
        row.population_transfer = rep.population_transfer;
        for (const auto& g : rep.guards) {
            if (g.name == "classical-backflow-finite-t") row.classical_finite_margin = g.margin;
            if (g.name == "classical-backflow-asymptotic") {
                row.classical_asymptotic_margin = g.margin;
            }
            if (g.name == "negative-momentum-negligible") row.negative_momentum_margin = g.margin;
            if (g.name.rfind("hierarchy", 0) == 0) row.hierarchy_margin = g.margin;
        }
        rows.push_back(row);
    }
    write_design_sweep_csv(out_dir / "design_sweep.csv", rows);

    const DesignReport rep = design_report(scenario.design_input(),
                                           scenario.expansion_natural(),
                                           scenario.sigma_r_natural());
    std::ostringstream text;
    text << "design report (alpha = " << format_general(scenario.alpha, 8) << ")\n";
    text << "  optimal_a2          = " << format_general(rep.a2_opt, 8) << "\n";
    text << "  F_min               = " << format_general(rep.f_min, 8) << "\n";
    text << "  population_transfer = " << format_general(rep.population_transfer, 8) << "\n";
    for (const auto& g : rep.guards) {
        text << "  [" << (g.pass ? "PASS" : "FAIL") << "] " << g.name
             << " margin=" << format_general(g.margin, 6) << " (" << g.detail << ")\n";
    }
    write_text(out_dir / "design_report.txt", text.str());

    std::ostringstream kv;
    kv << "alpha = " << format_g17(rep.alpha) << "\n";
    kv << "a2_opt = " << format_g17(rep.a2_opt) << "\n";
    kv << "f_min = " << format_g17(rep.f_min) << "\n";
    kv << "population_transfer = " << format_g17(rep.population_transfer) << "\n";
    for (std::size_t i = 0; i < rep.guards.size(); ++i) {
        kv << "guard." << i << ".name = " << rep.guards[i].name << "\n";
        kv << "guard." << i << ".pass = " << (rep.guards[i].pass ? 1 : 0) << "\n";
        kv << "guard." << i << ".margin = " << format_g17(rep.guards[i].margin) << "\n";
    }
    write_text(out_dir / "design_report.kv", kv.str());
    std::cout << "wrote " << (out_dir / "design_sweep.csv").string()
              << " (" << rows.size() << " rows), design_report.txt, design_report.kv\n";
    return 0;
}

int cmd_imaging(const Scenario& scenario, const fs::path& out_dir, double sigma_min,
                double sigma_max, int steps) {
    if (sigma_min < 0.0 || sigma_max < sigma_min || steps < 1) {
        throw std::invalid_argument("imaging: need 0 <= sigma-min <= sigma-max, steps >= 1");
    }
    fs::create_directories(out_dir);
    const BraggConfig bragg = scenario.bragg();

    std::vector<DetectabilityRow> rows;
    for (int i = 0; i < steps; ++i) {
        const double sigma_si =
            steps == 1 ? sigma_min
                       : sigma_min + (sigma_max - sigma_min) * i / (steps - 1.0);
        const double sigma_nat = sigma_si / scenario.scales.a_x;
        const DetectabilityReport rep = assess_detectability(bragg, scenario.alpha, sigma_nat);
        rows.push_back({sigma_si, rep.zeta, rep.observed_min_norm, rep.critical_norm,
                        rep.detectable});
    }
    write_detectability_csv(out_dir / "detectability.csv", rows);

    // key-value report at the scenario's own resolution
    {
        const DetectabilityReport rep =
            assess_detectability(bragg, scenario.alpha, scenario.sigma_r_natural());
        std::ostringstream kv;
        kv << "sigma_r_m = " << format_g17(scenario.params.sigma_r) << "\n";
        kv << "zeta = " << format_g17(rep.zeta) << "\n";
        kv << "observed_min_norm = " << format_g17(rep.observed_min_norm) << "\n";
        kv << "critical_norm = " << format_g17(rep.critical_norm) << "\n";
        kv << "detectable = " << (rep.detectable ? 1 : 0) << "\n";
        if (rep.status == DetectStatus::Solved) {
            kv << "sigma_r_critical_m = "
               << format_g17(rep.sigma_r_critical * scenario.scales.a_x) << "\n";
        } else {
            kv << "sigma_r_critical_m = "
               << (rep.status == DetectStatus::NeverDetectable ? "never_detectable"
                                                               : "always_detectable")
               << "\n";
        }
        write_text(out_dir / "detectability.kv", kv.str());
    }

    const CriticalResolution closed = critical_resolution(bragg, scenario.alpha);
    const CriticalResolution bisect = critical_resolution_bisect(bragg, scenario.alpha);
    if (closed.status == DetectStatus::Solved) {
        const double si = closed.sigma_r * scenario.scales.a_x;
        const double agreement =
            std::abs(closed.sigma_r - bisect.sigma_r) / closed.sigma_r;
        std::cout << "sigma_r_critical = " << format_general(si * 1e6, 6)
                  << " um (closed form; bisection agrees to "
                  << format_general(agreement, 3) << ")\n";
    } else {
        std::cout << "sigma_r_critical: "
                  << (closed.status == DetectStatus::NeverDetectable ? "never detectable"
                                                                     : "always detectable")
                  << "\n";
    }
    std::cout << "wrote " << (out_dir / "detectability.csv").string() << " (" << rows.size()
              << " rows)\n";
    return 0;
}

int cmd_validate(const Scenario& scenario, bool quick, double dt) {
    ValidateOptions opts;
    opts.quick = quick;
    opts.dt = dt;
    const auto results = run_validation_suite(scenario, opts);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << "[" << (r.pass ? "PASS" : "FAIL") << "] " << r.name << ": value = "
                  << format_general(r.value, 6) << " (bound " << format_general(r.bound, 6)
                  << ")";
        if (!r.detail.empty()) std::cout << " " << r.detail;
        std::cout << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "validation OK" : "validation FAILED") << "\n";
    return all_pass ? 0 : 1;
}

int cmd_oracle_run(const Scenario& scenario, const fs::path& out_dir,
                   const std::string& snapshot_list, const std::string& checkpoint_path,
                   int n_points, double dt) {
    fs::create_directories(out_dir);
    const double t1 = scenario.hold_natural();
    const double t_end = t1 + scenario.expansion_natural();

    std::vector<double> times;  // natural units, protocol clock (0 = trap shift)
    if (!snapshot_list.empty()) {
        std::istringstream in(snapshot_list);
        std::string item;
        while (std::getline(in, item, ',')) {
            const double t_si = std::stod(item);
            const double t_nat = t_si * scenario.params.omega_x;
            if (t_nat < 0.0 || t_nat > t_end + 1e-12) {
                throw std::invalid_argument(
                    "oracle-run: snapshot time outside [0, t1 + expansion]");
            }
            times.push_back(t_nat);
        }
        std::sort(times.begin(), times.end());
    }

    oracle::GroundStateOptions gs;
    gs.dtau_min = 4e-3;
    oracle::Simulation sim = oracle::Simulation::ground_state(
        protocol_grid(scenario, n_points), oracle::Potential::harmonic(-scenario.d_natural()),
        scenario.params.regime == Regime::ThomasFermi ? scenario.g1d_natural() : 0.0,
        scenario.params.regime == Regime::ThomasFermi ? scenario.params.n_atoms : 1.0, gs);

    double now = 0.0;
    auto advance_to = [&](double target) {
        if (target > now && now < t1) {
            const double in_trap = std::min(target, t1) - now;
            sim.evolve(in_trap, oracle::Potential::harmonic(0.0), dt);
            now += in_trap;
        }
        if (target > now) {
            sim.evolve(target - now, oracle::Potential::free_space(), dt);
            now = target;
        }
    };

    int index = 0;
    for (double t : times) {
        advance_to(t);
        std::ostringstream name;
        name << "snapshot_" << index++ << ".csv";
        write_snapshot_csv(out_dir / name.str(), sim, scenario.scales);
    }
    advance_to(t_end);
    sim.bragg_kick(scenario.bragg());
    write_snapshot_csv(out_dir / "final_state.csv", sim, scenario.scales);
    if (!checkpoint_path.empty()) save_checkpoint(sim, checkpoint_path);

    std::cout << "wrote " << index << " snapshot(s) and final_state.csv to "
              << out_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-backflow detection protocol: analytic profiles, experiment"
                 " design, imaging detectability, and a split-step oracle"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario config file (key = value, SI units)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--set", overrides, "override config entries, key=value");
    };

    auto* simulate = app.add_subcommand("simulate", "density/current profile + report");
    bool with_oracle = false;
    add_common(simulate);
    simulate->add_flag("--oracle", with_oracle, "cross-check against the split-step oracle");

    auto* design = app.add_subcommand("design", "alpha sweep of the optimal Bragg amplitude");
    double alpha_min = 0.01, alpha_max = 10.0, alpha_steps = 100;
    add_common(design);
    design->add_option("--alpha-min", alpha_min);
    design->add_option("--alpha-max", alpha_max);
    design->add_option("--alpha-steps", alpha_steps);

    auto* imaging = app.add_subcommand("imaging", "detectability vs imaging resolution");
    double sigma_min = 0.0, sigma_max = 2e-5, sigma_steps = 41;
    add_common(imaging);
    imaging->add_option("--sigma-min", sigma_min, "m");
    imaging->add_option("--sigma-max", sigma_max, "m");
    imaging->add_option("--sigma-steps", sigma_steps);

    auto* validate_cmd = app.add_subcommand("validate", "analytic-vs-oracle check suite");
    bool quick = false;
    double dt = 1e-3;
    add_common(validate_cmd);
    validate_cmd->add_flag("--quick", quick, "reduced grid (1024 points)");
    validate_cmd->add_option("--dt", dt, "split-step time step (natural units)");

    auto* oracle_run = app.add_subcommand("oracle-run", "split-step run with snapshots");
    std::string snapshots, checkpoint;
    int oracle_points = 8192;
    double oracle_dt = 1e-3;
    add_common(oracle_run);
    oracle_run->add_option("--snapshots", snapshots, "comma-separated times (s, protocol clock)");
    oracle_run->add_option("--checkpoint", checkpoint, "binary checkpoint output path");
    oracle_run->add_option("--points", oracle_points, "grid points (power of two)");
    oracle_run->add_option("--dt", oracle_dt, "time step (natural units)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints message/help
        return (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") ? 0 : 2;
    }

    try {
        const Scenario scenario = build_scenario(config_path, overrides);
        if (simulate->parsed()) return cmd_simulate(scenario, out_dir, with_oracle);
        if (design->parsed()) {
            return cmd_design(scenario, out_dir, alpha_min, alpha_max,
                              static_cast<int>(alpha_steps));
        }
        if (imaging->parsed()) {
            return cmd_imaging(scenario, out_dir, sigma_min, sigma_max,
                               static_cast<int>(sigma_steps));
        }
        if (validate_cmd->parsed()) return cmd_validate(scenario, quick, dt);
        if (oracle_run->parsed()) {
            return cmd_oracle_run(scenario, out_dir, snapshots, checkpoint, oracle_points,
                                  oracle_dt);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
