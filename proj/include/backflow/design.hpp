// Experiment design: the plane-wave backflow-strength function F(alpha, A2),
// the optimal Bragg amplitude, classical-effect guards, and the parameter
// hierarchy validator. Natural units (lengths in a_x).
#pragma once

#include <string>
#include <vector>

#include "backflow/units.hpp"

namespace backflow {

// F(alpha, A2) = 1 + alpha A2^2 - (2 + alpha) A2 sqrt(1 - A2^2).
// Backflow at the packet center is possible iff F < 0.
double backflow_function(double alpha, double a2);

// Amplitude minimizing F at fixed alpha: closed form sin(arctan((2+alpha)/alpha)/2),
// the root of 2 alpha A2 sqrt(1-A2^2) + (2+alpha)(2 A2^2 - 1) = 0 in (0, 1/sqrt(2)).
double optimal_a2(double alpha);

// Independent verification path: bracketing bisection on the optimality
// equation. Agrees with optimal_a2 to 1e-10.
double optimal_a2_root(double alpha);

struct GuardResult {
    std::string name;
    bool pass = false;
    double margin = 0.0;  // factor by which the condition is satisfied (>= 1 passes)
    std::string detail;
};

struct DesignInput {
    double alpha = 0.0;   // q/k1
    double d = 0.0;       // trap shift, a_x
    double r0 = 1.0;      // initial half width, a_x (1 for Gaussian, R_TF for TF)
    Regime regime = Regime::NonInteracting;
};

// Classical-effect guards:
//   classical-backflow (finite t):  R0 < v1/bdot(t)
//   classical-backflow (asymptotic): R0 < f v1/omega_x = f d, f = 1 or 1/sqrt(2)
//   negative-momentum: k1 a_x = d/a_x >= momentum_ratio_threshold
std::vector<GuardResult> classical_guards(const DesignInput& input, double t,
                                          double momentum_ratio_threshold = 2.0);

// Hierarchy 1 << d/a_x << (2 pi / alpha)(a_x / sigma_r), with "<<" read as
// ">= margin". r1 = d/a_x, r2 = [(2 pi/alpha)(a_x/sigma_r)] / (d/a_x).
GuardResult hierarchy_check(const DesignInput& input, double sigma_r, double margin = 2.0);

struct DesignReport {
    double alpha = 0.0;
    double a2_opt = 0.0;
    double f_min = 0.0;                // F(alpha, a2_opt), < 0 when backflow achievable
    double population_transfer = 0.0;  // a2_opt^2
    std::vector<GuardResult> guards;   // classical guards + hierarchy
};

DesignReport design_report(const DesignInput& input, double t, double sigma_r,
                           double momentum_ratio_threshold = 2.0, double hierarchy_margin = 2.0);

}  // namespace backflow
