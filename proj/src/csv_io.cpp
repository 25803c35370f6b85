#include "backflow/csv_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "backflow/text_format.hpp"

namespace backflow {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep '\n' on every platform
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

void write_profile_csv(const std::filesystem::path& path, const FieldProfile& profile,
                       const DerivedScales& scales) {
    auto out = open_out(path);
    out << "x_m,rho_per_m,J_per_s,rho_crit_per_m,eta,regime\n";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        out << format_g17(from_natural(profile.x[i], Quantity::Length, scales)) << ','
            << format_g17(from_natural(profile.rho[i], Quantity::Density, scales)) << ','
            << format_g17(from_natural(profile.current[i], Quantity::Current, scales)) << ',';
        if (!std::isnan(profile.rho_crit[i])) {
            out << format_g17(from_natural(profile.rho_crit[i], Quantity::Density, scales));
        }
        out << ',' << format_g17(profile.eta[i]) << ','
            << (profile.regime[i] == RegimeTag::QuantumWindow ? "QuantumWindow"
                                                              : "ClassicalRegion")
            << '\n';
    }
}

void write_design_sweep_csv(const std::filesystem::path& path,
                            const std::vector<DesignSweepRow>& rows) {
    auto out = open_out(path);
    out << "alpha,a2_opt,f_min,population_transfer,classical_finite_margin,"
           "classical_asymptotic_margin,negative_momentum_margin,hierarchy_margin\n";
    for (const auto& r : rows) {
        out << format_g17(r.alpha) << ',' << format_g17(r.a2_opt) << ','
            << format_g17(r.f_min) << ',' << format_g17(r.population_transfer) << ','
            << format_g17(r.classical_finite_margin) << ','
            << format_g17(r.classical_asymptotic_margin) << ','
            << format_g17(r.negative_momentum_margin) << ','
            << format_g17(r.hierarchy_margin) << '\n';
    }
}

void write_detectability_csv(const std::filesystem::path& path,
                             const std::vector<DetectabilityRow>& rows) {
    auto out = open_out(path);
    out << "sigma_r_m,zeta,observed_min_norm,critical_norm,detectable\n";
    for (const auto& r : rows) {
        out << format_g17(r.sigma_r_m) << ',' << format_g17(r.zeta) << ','
            << format_g17(r.observed_min_norm) << ',' << format_g17(r.critical_norm) << ','
            << (r.detectable ? 1 : 0) << '\n';
    }
}

void write_snapshot_csv(const std::filesystem::path& path, const oracle::Simulation& sim,
                        const DerivedScales& scales) {
    auto out = open_out(path);
    out << "x_m,re_psi,im_psi,rho_per_m,J_per_s\n";
    const auto x = sim.grid().coordinates();
    const auto j = sim.current();
    const double psi_scale = 1.0 / std::sqrt(scales.a_x);  // natural -> 1/sqrt(m)
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto& c = sim.psi()[i];
        out << format_g17(from_natural(x[i], Quantity::Length, scales)) << ','
            << format_g17(c.real() * psi_scale) << ',' << format_g17(c.imag() * psi_scale)
            << ',' << format_g17(from_natural(std::norm(c), Quantity::Density, scales))
            << ',' << format_g17(from_natural(j[i], Quantity::Current, scales)) << '\n';
    }
}

}  // namespace backflow
