// Finite imaging resolution: fringe-contrast factor zeta, normalized observed
// and critical densities near the packet center, the critical-resolution
// solver, and Gaussian blurring of density profiles. Natural units.
#pragma once

#include "backflow/interference.hpp"

namespace backflow {

// zeta = exp(-q^2 sigma_r^2 / 2): attenuation of the cos(qx) fringe term
// under a Gaussian imaging kernel of standard deviation sigma_r.
double contrast_factor(double q, double sigma_r);

// Observed normalized density minimum near the center:
// (A1^2 + A2^2 - 2 zeta A1 A2) / (A1^2 + A2^2 + 2 zeta A1 A2) * envelope_ratio,
// envelope_ratio = |phi(x_min)|^2 / |phi_max|^2 (defaults to 1 at the center).
// zeta must lie in [0, 1]; zeta = 0 returns the washed-out limit.
double observed_min_norm(const BraggConfig& bragg, double zeta, double envelope_ratio = 1.0);

// Normalized critical density at the center (plane-wave limit grad theta = k1):
// [alpha/(alpha+2)] (A1 - A2)/(A1 + A2) * envelope_ratio.
double critical_norm(const BraggConfig& bragg, double alpha, double envelope_ratio = 1.0);

enum class DetectStatus { Solved, AlwaysDetectable, NeverDetectable };

struct CriticalResolution {
    DetectStatus status = DetectStatus::Solved;
    double sigma_r = 0.0;  // a_x; meaningful only when status == Solved
    double zeta = 0.0;     // contrast at the crossing
};

// Largest sigma_r at which the observed minimum still drops below the
// critical value: solves observed_min_norm(zeta) = critical_norm for zeta,
// then sigma_r* = sqrt(-2 ln zeta)/q. Exact algebra.
CriticalResolution critical_resolution(const BraggConfig& bragg, double alpha);
// Independent verification path: bisection on sigma_r.
CriticalResolution critical_resolution_bisect(const BraggConfig& bragg, double alpha);

struct DetectabilityReport {
    double zeta = 1.0;
    double observed_min_norm = 1.0;
    double critical_norm = 0.0;
    bool detectable = false;       // observed_min_norm < critical_norm
    double sigma_r_critical = 0.0; // a_x (NaN unless status == Solved)
    DetectStatus status = DetectStatus::Solved;
};

DetectabilityReport assess_detectability(const BraggConfig& bragg, double alpha,
                                         double sigma_r);

// Convolves rho with a normalized Gaussian kernel of standard deviation
// sigma_r (zero-padded boundaries). Other channels are copied unchanged:
// only the density is an imaged observable. sigma_r = 0 is the identity;
// otherwise requires grid spacing < sigma_r / 4.
FieldProfile blur_profile(const FieldProfile& profile, double sigma_r);

}  // namespace backflow
