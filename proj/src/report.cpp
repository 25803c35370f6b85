#include "backflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "backflow/text_format.hpp"

namespace backflow {

ProfileSummary summarize_profile(const Scenario& scenario, const FieldProfile& profile) {
    ProfileSummary s;
    const WavepacketState packet = scenario.packet();
    const BraggConfig bragg = scenario.bragg();
    const double center = packet.center();
    s.fringe_wavelength = 2.0 * constants::pi / bragg.q;

    std::size_t arg_max = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile.rho[i] > profile.rho[arg_max]) arg_max = i;
    }
    s.rho_max = profile.rho[arg_max];
    s.x_at_rho_max = profile.x[arg_max];

    const auto minima = density_minima(profile);
    if (!minima.empty()) {
        const auto nearest = std::min_element(
            minima.begin(), minima.end(), [center](double a, double b) {
                return std::abs(a - center) < std::abs(b - center);
            });
        s.x_central_min = *nearest;
        s.central_min_norm = total_density(*nearest, packet, bragg) / s.rho_max;
    }

    if (const auto crit = critical_density(center, packet, bragg)) {
        s.crit_norm_at_center = *crit / s.rho_max;
    }
    s.eta_at_center = eta(center, packet, bragg);

    // grad-theta spread across the plane-wave window around the center
    const double half = scenario.center_window * packet.envelope_width();
    const double g_lo = packet.phase_gradient(center - half);
    const double g_hi = packet.phase_gradient(center + half);
    const double g_c = packet.phase_gradient(center);
    s.grad_theta_variation = std::max(std::abs(g_hi - g_c), std::abs(g_lo - g_c)) /
                             std::abs(g_c);

    // 0.1% depth floor: keeps every fringe window (deepest ~10% of max|J|)
    // while dropping the single-packet tail region (~4e-4 in the guarded case).
    s.windows = backflow_windows(profile, 1e-3);
    if (s.windows.size() >= 2) {
        double acc = 0.0;
        for (std::size_t i = 1; i < s.windows.size(); ++i) {
            acc += s.windows[i].x_center - s.windows[i - 1].x_center;
        }
        s.mean_window_spacing = acc / (static_cast<double>(s.windows.size()) - 1.0);
    }
    return s;
}

namespace {

std::string si(double natural, Quantity kind, const DerivedScales& scales) {
    return format_general(from_natural(natural, kind, scales), 8);
}

}  // namespace

std::string render_simulate_report(const Scenario& scenario,
                                   const ProfileSummary& summary,
                                   const DesignReport& design,
                                   const DetectabilityReport& detect,
                                   const std::optional<OracleComparison>& oracle_check) {
    const auto& scales = scenario.scales;
    const WavepacketState packet = scenario.packet();
    std::ostringstream out;

    out << "backflow simulation report\n";
    out << "==========================\n\n";
    out << "scenario (SI)\n";
    out << "  atom_mass_kg      = " << format_general(scenario.params.atom_mass, 8) << "\n";
    out << "  omega_x_rad_s     = " << format_general(scenario.params.omega_x, 8) << "\n";
    out << "  omega_perp_rad_s  = " << format_general(scenario.params.omega_perp, 8) << "\n";
    out << "  shift_d_m         = " << format_general(scenario.params.shift_d, 8) << "\n";
    out << "  hold_time_t1_s    = " << format_general(effective_hold_time(scenario.params), 8)
        << "\n";
    out << "  expansion_time_s  = " << format_general(scenario.params.expansion_time_t, 8)
        << "\n";
    out << "  sigma_r_m         = " << format_general(scenario.params.sigma_r, 8) << "\n";
    out << "  regime            = "
        << (scenario.params.regime == Regime::NonInteracting ? "noninteracting"
                                                             : "thomas-fermi")
        << "\n";
    out << "  alpha (q/k1)      = " << format_general(scenario.alpha, 8) << "\n";
    out << "  bragg_a2          = " << format_general(scenario.bragg_a2, 8)
        << (scenario.a2_from_alpha ? "  (optimal for alpha)" : "") << "\n";
    out << "  bragg_phase_rad   = " << format_general(scenario.bragg_phase, 8) << "\n";
    for (const auto& w : scenario.warnings) out << "  warning: " << w << "\n";

    out << "\nderived scales\n";
    out << "  a_x_m        = " << format_general(scales.a_x, 8) << "\n";
    out << "  v1_m_s       = " << format_general(scales.v1, 8) << "\n";
    out << "  k1_per_m     = " << format_general(scales.k1, 8) << "\n";
    out << "  q_per_m      = " << format_general(scales.k1 * scenario.alpha, 8) << "\n";
    out << "  lambda_m     = " << si(summary.fringe_wavelength, Quantity::Length, scales)
        << "\n";

    out << "\nexpansion state (t = " << format_general(scenario.expansion_natural(), 8)
        << " / omega_x)\n";
    out << "  b            = " << format_general(packet.scaling.b, 10) << "\n";
    out << "  b_dot        = " << format_general(packet.scaling.b_dot, 10) << "\n";
    out << "  center_m     = " << si(packet.center(), Quantity::Length, scales) << "\n";
    if (const auto xm = packet.x_minus()) {
        out << "  x_minus_m    = " << si(*xm, Quantity::Length, scales) << "\n";
    } else {
        out << "  x_minus_m    = none (b_dot = 0: no negative-flux region)\n";
    }

    out << "\ndesign\n";
    out << "  optimal_a2(alpha)   = " << format_general(design.a2_opt, 8) << "\n";
    out << "  F_min               = " << format_general(design.f_min, 8) << "\n";
    out << "  population_transfer = " << format_general(design.population_transfer, 8)
        << "\n";
    out << "  guards (advisory):\n";
    for (const auto& g : design.guards) {
        out << "    [" << (g.pass ? "PASS" : "FAIL") << "] " << g.name
            << " margin=" << format_general(g.margin, 6) << " (" << g.detail << ")\n";
    }

    out << "\nprofile\n";
    out << "  rho_max at x_m           = " << si(summary.x_at_rho_max, Quantity::Length, scales)
        << "\n";
    out << "  central min rho/rho_max  = " << format_general(summary.central_min_norm, 8)
        << "\n";
    out << "  rho_crit/rho_max @center = " << format_general(summary.crit_norm_at_center, 8)
        << "\n";
    if (scenario.bragg_a2 > scenario.bragg().a1) {
        out << "  note: A2 > A1, critical threshold is negative -- backflow cannot be"
               " flagged by the density criterion\n";
    }
    out << "  eta at center            = " << format_general(summary.eta_at_center, 8) << "\n";
    out << "  grad-theta variation across +/-" << format_general(scenario.center_window, 4)
        << " envelope widths = " << format_general(100.0 * summary.grad_theta_variation, 4)
        << " %\n";

    out << "\nbackflow windows (depth >= 1e-3 max|J|)\n";
    if (summary.windows.empty()) {
        out << "  no backflow windows\n";
    } else {
        out << "  count = " << summary.windows.size() << "\n";
        double deepest = 0.0;
        for (const auto& w : summary.windows) deepest = std::min(deepest, w.j_min);
        for (const auto& w : summary.windows) {
            out << "  [" << si(w.x_lo, Quantity::Length, scales) << ", "
                << si(w.x_hi, Quantity::Length, scales)
                << "] m, center offset = " << si(w.x_center - packet.center(),
                                                 Quantity::Length, scales)
                << " m, J_min/|J|_deepest = " << format_general(w.j_min / deepest, 6) << "\n";
        }
        if (summary.mean_window_spacing) {
            out << "  mean window spacing = "
                << si(*summary.mean_window_spacing, Quantity::Length, scales)
                << " m (lambda = " << si(summary.fringe_wavelength, Quantity::Length, scales)
                << " m)\n";
        }
    }

    out << "\nimaging (sigma_r = " << format_general(scenario.params.sigma_r, 8) << " m)\n";
    out << "  zeta               = " << format_general(detect.zeta, 8) << "\n";
    out << "  observed_min_norm  = " << format_general(detect.observed_min_norm, 8) << "\n";
    out << "  critical_norm      = " << format_general(detect.critical_norm, 8) << "\n";
    out << "  detectable         = " << (detect.detectable ? "yes" : "no") << "\n";
    switch (detect.status) {
        case DetectStatus::Solved:
            out << "  sigma_r_critical_m = "
                << si(detect.sigma_r_critical, Quantity::Length, scales) << "\n";
            break;
        case DetectStatus::AlwaysDetectable:
            out << "  sigma_r_critical_m = always detectable\n";
            break;
        case DetectStatus::NeverDetectable:
            out << "  sigma_r_critical_m = never detectable\n";
            break;
    }

    if (oracle_check) {
        out << "\noracle cross-check (split-step end-to-end)\n";
        out << "  max|rho - rho_analytic| / rho_max = "
            << format_general(oracle_check->rho_linf_norm, 6) << "\n";
        out << "  max|J - J_analytic| / max|J|      = "
            << format_general(oracle_check->current_linf_norm, 6) << "\n";
        out << "  continuity residual               = "
            << format_general(oracle_check->continuity_residual, 6) << "\n";
    }
    return out.str();
}

}  // namespace backflow
