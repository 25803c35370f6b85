// Post-Bragg superposition: total density, total current (two algebraic
// routes), the quantum/classical discriminant eta, the critical density
// threshold, and grid-profile assembly. Natural units.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "backflow/wavepacket.hpp"

namespace backflow {

// Two-momentum superposition Psi = psi (A1 + A2 e^{i(qx + phase)}).
// Amplitudes are normalized on construction so a1^2 + a2^2 = 1.
struct BraggConfig {
    double a1 = 1.0;
    double a2 = 0.0;
    double q = 0.0;       // momentum kick, 1/a_x, > 0
    double phase = 0.0;   // varphi

    // a2 in [0,1]; a1 = sqrt(1 - a2^2).
    BraggConfig(double a2_amplitude, double kick_q, double varphi = 0.0);
    // Normalizes (a1, a2); both must be non-negative.
    static BraggConfig from_amplitudes(double a1, double a2, double kick_q, double varphi = 0.0);
};

double total_density(double x, const WavepacketState& packet, const BraggConfig& bragg);

// Two-term form |phi|^2 [q (A2^2 + A1 A2 cos) + grad(theta) (A1^2 + A2^2 + 2 A1 A2 cos)].
double total_current(double x, const WavepacketState& packet, const BraggConfig& bragg);
// Equivalent route via the total density:
// grad(theta) rho + (q/2)(rho + |phi|^2 (A2^2 - A1^2)).
// Kept as an independent code path; must agree with total_current to 1e-12.
double total_current_from_density(double x, const WavepacketState& packet,
                                  const BraggConfig& bragg);

// eta = 1 + 2 grad(theta)/q. eta > 0: quantum regime; eta <= 0: classical.
double eta(double x, const WavepacketState& packet, const BraggConfig& bragg);

// Critical density threshold q/(q + 2 grad theta) |phi|^2 (A1^2 - A2^2).
// Empty in the classical region (eta <= 0). A negative return value (A2 > A1)
// means backflow can never be flagged by the density criterion there.
std::optional<double> critical_density(double x, const WavepacketState& packet,
                                       const BraggConfig& bragg);

enum class RegimeTag { QuantumWindow, ClassicalRegion };

struct FieldProfile {
    std::vector<double> x;         // a_x
    std::vector<double> rho;       // 1/a_x
    std::vector<double> current;   // omega_x
    std::vector<double> rho_crit;  // 1/a_x; NaN where undefined (classical)
    std::vector<double> eta;
    std::vector<RegimeTag> regime;

    std::size_t size() const { return x.size(); }
    double dx() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
};

struct ProfileGrid {
    int n_points = 4096;       // refined upward to resolve fringes when auto_refine
    double half_widths = 5.0;  // span = +/- half_widths * envelope width around center
    bool auto_refine = true;   // false: error if dx > lambda/8, never resize
    std::optional<double> x_min;  // explicit bounds override the half_widths rule
    std::optional<double> x_max;
};

// Samples rho, J, rho_crit, eta, regime on a uniform grid. Guarantees grid
// spacing <= lambda/40 (lambda = 2 pi / q) unless auto_refine is off, in which
// case spacing > lambda/8 is an error.
FieldProfile profile(const WavepacketState& packet, const BraggConfig& bragg,
                     const ProfileGrid& grid = {});

// --- profile analysis helpers (reports, tests) ---

struct BackflowWindow {
    double x_lo = 0.0;      // J = 0 crossings (linear interpolation)
    double x_hi = 0.0;
    double x_center = 0.0;  // midpoint of the window
    double j_min = 0.0;     // deepest current in the window
    double x_at_min = 0.0;  // parabolic-refined position of the minimum
};

// Contiguous J < 0 runs, deepest first excluded: ordered by position.
// Windows shallower than depth_floor * max|J| are dropped.
std::vector<BackflowWindow> backflow_windows(const FieldProfile& profile,
                                             double depth_floor = 1e-6);

// Positions of local density minima (parabolic refinement), ordered by x.
// Minima shallower than floor_frac of the global density max are kept too;
// only strict interior minima qualify.
std::vector<double> density_minima(const FieldProfile& profile);

}  // namespace backflow
