// Physical constants, experiment parameters, and the SI <-> natural unit bridge.
//
// All physics in this library is computed in natural units hbar = m = omega_x = 1:
// lengths in a_x = sqrt(hbar/(m omega_x)), times in 1/omega_x. SI values appear
// only at the configuration and report boundaries.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace backflow {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double atomic_mass_unit = 1.66053907e-27;   // kg
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

enum class Regime { NonInteracting, ThomasFermi };

// Physical setup in SI units. Times and frequencies must be strictly positive,
// shift_d >= 0; omega_perp >> omega_x is advisory (warning, not error).
struct ExperimentParams {
    double atom_mass = 0.0;         // kg
    double omega_x = 0.0;           // rad/s, axial trap frequency
    double omega_perp = 0.0;        // rad/s, radial trap frequency
    double shift_d = 0.0;           // m, sudden trap displacement
    double hold_time_t1 = -1.0;     // s; negative -> default pi/(2 omega_x)
    double expansion_time_t = 0.0;  // s, free expansion before the Bragg pulse
    double sigma_r = 0.0;           // m, imaging resolution (0 = perfect)
    double n_atoms = 1.0;           // atom number (matters in the TF case)
    double g3d = 0.0;               // J m^3, 3D coupling (0 = ideal gas)
    Regime regime = Regime::NonInteracting;
};

struct DerivedScales {
    double a_x;     // m, axial oscillator length sqrt(hbar/(m omega_x))
    double a_perp;  // m, radial oscillator length
    double v1;      // m/s, launch velocity omega_x * d
    double k1;      // 1/m, launch wavenumber m v1 / hbar
    double t_unit;  // s, 1/omega_x
    double x_unit;  // m, = a_x
    double g1d;     // J m, quasi-1D coupling g3d / (2 pi a_perp^2)
};

// Hard validation; throws std::invalid_argument naming the offending field.
// Returns advisory warnings (e.g. omega_perp not >> omega_x).
std::vector<std::string> validate(const ExperimentParams& params);

// Fills hold_time_t1 default in a copy-free way: callers should use
// effective_hold_time() when they need the resolved value.
double effective_hold_time(const ExperimentParams& params);

DerivedScales derive_scales(const ExperimentParams& params);

enum class Quantity {
    Length,
    Time,
    Velocity,
    Wavenumber,
    Momentum,
    Density,   // 1D density, 1/m
    Current,   // probability current, 1/s
    Energy,
};

double to_natural(double value_si, Quantity kind, const DerivedScales& scales);
double from_natural(double natural_value, Quantity kind, const DerivedScales& scales);

// Small built-in species table (mass = mass number x u). Case-insensitive,
// accepts "7Li"/"Li7" style names. Returns mass in kg.
std::optional<double> species_mass(std::string_view name);

}  // namespace backflow
