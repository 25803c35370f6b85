// Analytic expanded wavepacket: initial profile, scaling parameter b(t),
// envelope, and phase gradient. Natural units (hbar = m = omega_x = 1)
// throughout: x in a_x, t in 1/omega_x, wavenumbers in 1/a_x.
#pragma once

#include <optional>

#include "backflow/units.hpp"

namespace backflow {

// Initial (in-trap) envelope. Gaussian: unit-norm minimum-uncertainty state of
// width a_x. Thomas-Fermi: inverted parabola of half-width R_TF normalized to
// the atom number.
struct InitialProfile {
    Regime regime = Regime::NonInteracting;
    double width_r0 = 1.0;       // half width: 1 (Gaussian) or R_TF
    double norm = 1.0;           // integral of |psi0|^2: 1 or N
    double chem_potential = 0.0; // TF only, units of hbar*omega_x
    double g1d = 0.0;            // TF only, units of hbar*omega_x*a_x

    static InitialProfile gaussian();
    // n_atoms > 0, g1d_natural > 0; chemical potential fixed by normalization.
    static InitialProfile thomas_fermi(double n_atoms, double g1d_natural);

    double psi0(double x) const;  // real, >= 0
};

struct ScalingState {
    double b = 1.0;      // scaling parameter, b(0) = 1
    double b_dot = 0.0;  // db/dt, units omega_x
    double time = 0.0;
};

// Non-interacting: closed form b = sqrt(1 + t^2). Thomas-Fermi: adaptive
// RK4(5) integration of b'' = 1/b^2 from (1, 0). Throws on t < 0.
ScalingState scaling_evolve(Regime regime, double t);

// Expanded packet at a fixed time: phi(x) = b^{-1/2} psi0((x - k1 t)/b),
// grad theta = x (bdot/b) + k1 (1 - (bdot/b) t).
struct WavepacketState {
    InitialProfile profile;
    ScalingState scaling;
    double k1 = 0.0;  // launch wavenumber (= launch velocity in natural units)

    static WavepacketState at_time(const InitialProfile& profile, double k1, double t);

    double center() const { return k1 * scaling.time; }
    double envelope_width() const { return scaling.b * profile.width_r0; }
    double envelope(double x) const;
    double phase_gradient(double x) const;
    // Single-packet flux (hbar/m) |phi|^2 grad(theta).
    double flux(double x) const;
    // Zero crossing of the single-packet flux, x_- = v1 (t - b/bdot).
    // Empty when bdot == 0 (no negative-flux region).
    std::optional<double> x_minus() const;
};

}  // namespace backflow
