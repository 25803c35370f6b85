// Profile summaries and the human-readable simulate report.
#pragma once

#include <optional>
#include <string>

#include "backflow/scenario.hpp"

namespace backflow {

struct ProfileSummary {
    double rho_max = 0.0;           // natural units
    double x_at_rho_max = 0.0;
    double central_min_norm = 1.0;  // rho(minimum nearest center) / rho_max
    double x_central_min = 0.0;
    double crit_norm_at_center = 0.0;  // rho_crit(center) / rho_max
    double eta_at_center = 0.0;
    double grad_theta_variation = 0.0;  // relative spread across the center window
    std::vector<BackflowWindow> windows;  // depth >= 1e-4 max|J|
    std::optional<double> mean_window_spacing;  // a_x
    double fringe_wavelength = 0.0;             // 2 pi / q, a_x
};

ProfileSummary summarize_profile(const Scenario& scenario, const FieldProfile& profile);

struct OracleComparison {
    double rho_linf_norm = 0.0;       // max|rho_num - rho_analytic| / max rho
    double current_linf_norm = 0.0;   // max|J_num - J_analytic| / max|J|
    double continuity_residual = 0.0; // max|d(rho)/dt + dJ/dx| / max|d(rho)/dt|
};

std::string render_simulate_report(const Scenario& scenario,
                                   const ProfileSummary& summary,
                                   const DesignReport& design,
                                   const DetectabilityReport& detect,
                                   const std::optional<OracleComparison>& oracle_check);

}  // namespace backflow
