// CSV serialization. All numeric fields use 17-significant-digit scientific
// notation, '.' decimal separator, and '\n' line endings, so identical inputs
// produce byte-identical files.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "backflow/imaging.hpp"
#include "backflow/oracle.hpp"
#include "backflow/units.hpp"

namespace backflow {

// Columns: x_m, rho_per_m, J_per_s, rho_crit_per_m (empty when undefined),
// eta, regime. Positions/densities/currents converted to SI with `scales`.
void write_profile_csv(const std::filesystem::path& path, const FieldProfile& profile,
                       const DerivedScales& scales);

struct DesignSweepRow {
    double alpha = 0.0;
    double a2_opt = 0.0;
    double f_min = 0.0;
    double population_transfer = 0.0;
    double classical_finite_margin = 0.0;
    double classical_asymptotic_margin = 0.0;
    double negative_momentum_margin = 0.0;
    double hierarchy_margin = 0.0;
};
void write_design_sweep_csv(const std::filesystem::path& path,
                            const std::vector<DesignSweepRow>& rows);

struct DetectabilityRow {
    double sigma_r_m = 0.0;
    double zeta = 0.0;
    double observed_min_norm = 0.0;
    double critical_norm = 0.0;
    bool detectable = false;
};
void write_detectability_csv(const std::filesystem::path& path,
                             const std::vector<DetectabilityRow>& rows);

// Oracle snapshot: x_m, re_psi, im_psi, rho_per_m, J_per_s (psi in 1/sqrt(m)).
void write_snapshot_csv(const std::filesystem::path& path, const oracle::Simulation& sim,
                        const DerivedScales& scales);

}  // namespace backflow
