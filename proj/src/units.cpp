#include "backflow/units.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace backflow {

namespace {

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << field << " must be strictly positive (got " << value << ")";
        throw std::invalid_argument(msg.str());
    }
}

void require_non_negative(double value, const char* field) {
    if (value < 0.0 || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << field << " must be non-negative (got " << value << ")";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

double effective_hold_time(const ExperimentParams& params) {
    if (params.hold_time_t1 >= 0.0) return params.hold_time_t1;
    return constants::pi / (2.0 * params.omega_x);
}

std::vector<std::string> validate(const ExperimentParams& params) {
    require_positive(params.atom_mass, "atom_mass");
    require_positive(params.omega_x, "omega_x");
    require_positive(params.omega_perp, "omega_perp");
    require_non_negative(params.shift_d, "shift_d");
    require_positive(params.expansion_time_t, "expansion_time_t");
    require_positive(effective_hold_time(params), "hold_time_t1");
    require_non_negative(params.sigma_r, "sigma_r");
    require_positive(params.n_atoms, "n_atoms");
    require_non_negative(params.g3d, "g3d");
    if (params.regime == Regime::ThomasFermi && params.g3d == 0.0) {
        throw std::invalid_argument("g3d must be positive in the Thomas-Fermi regime");
    }

    std::vector<std::string> warnings;
    if (params.omega_perp < 10.0 * params.omega_x) {
        std::ostringstream msg;
        msg << "omega_perp/omega_x = " << params.omega_perp / params.omega_x
            << "; the quasi-1D factorization assumes tight radial confinement"
               " (omega_perp >> omega_x)";
        warnings.push_back(msg.str());
    }
    const double phase = params.omega_x * effective_hold_time(params);
    if (std::abs(std::sin(phase) - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "hold time gives omega_x*t1 = " << phase
            << " (not pi/2): release happens off the momentum maximum, but the"
               " launch wavenumber k1 is defined from v1 = omega_x*d";
        warnings.push_back(msg.str());
    }
    return warnings;
}

DerivedScales derive_scales(const ExperimentParams& params) {
    validate(params);
    DerivedScales s{};
    s.a_x = std::sqrt(constants::hbar / (params.atom_mass * params.omega_x));
    s.a_perp = std::sqrt(constants::hbar / (params.atom_mass * params.omega_perp));
    s.v1 = params.omega_x * params.shift_d;
    s.k1 = params.atom_mass * s.v1 / constants::hbar;
    s.t_unit = 1.0 / params.omega_x;
    s.x_unit = s.a_x;
    s.g1d = params.g3d / (2.0 * constants::pi * s.a_perp * s.a_perp);
    return s;
}

double to_natural(double value_si, Quantity kind, const DerivedScales& s) {
    switch (kind) {
        case Quantity::Length: return value_si / s.a_x;
        case Quantity::Time: return value_si / s.t_unit;
        case Quantity::Velocity: return value_si * s.t_unit / s.a_x;
        case Quantity::Wavenumber: return value_si * s.a_x;
        case Quantity::Momentum: return value_si * s.a_x / constants::hbar;
        case Quantity::Density: return value_si * s.a_x;
        case Quantity::Current: return value_si * s.t_unit;
        case Quantity::Energy: return value_si * s.t_unit / constants::hbar;
    }
    throw std::invalid_argument("unknown quantity kind");
}

double from_natural(double natural_value, Quantity kind, const DerivedScales& s) {
    switch (kind) {
        case Quantity::Length: return natural_value * s.a_x;
        case Quantity::Time: return natural_value * s.t_unit;
        case Quantity::Velocity: return natural_value * s.a_x / s.t_unit;
        case Quantity::Wavenumber: return natural_value / s.a_x;
        case Quantity::Momentum: return natural_value * constants::hbar / s.a_x;
        case Quantity::Density: return natural_value / s.a_x;
        case Quantity::Current: return natural_value / s.t_unit;
        case Quantity::Energy: return natural_value * constants::hbar / s.t_unit;
    }
    throw std::invalid_argument("unknown quantity kind");
}

std::optional<double> species_mass(std::string_view name) {
    std::string canon;
    for (char c : name) {
        if (c == '-' || c == '_' || c == ' ') continue;
        canon.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (canon == "7li" || canon == "li7") return 7.0 * constants::atomic_mass_unit;
    if (canon == "87rb" || canon == "rb87") return 87.0 * constants::atomic_mass_unit;
    return std::nullopt;
}

}  // namespace backflow
