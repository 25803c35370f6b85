// Analytic-vs-oracle cross-validation machinery, shared by the CLI validate
// command, simulate --oracle, and the acceptance suite.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "backflow/report.hpp"
#include "backflow/scenario.hpp"

namespace backflow {

// Spectral derivative of a periodic real sample set over total length L.
std::vector<double> spectral_derivative(const std::vector<double>& values, double length);

// Runs the full protocol (with kick) and compares density/current against the
// analytic superposition on the oracle grid; also evaluates the discrete
// continuity residual with centered time differences of width `delta`.
OracleComparison compare_protocol_to_analytic(const Scenario& scenario,
                                              const ProtocolOptions& opts,
                                              double delta = 2e-4);

// Pre-Bragg single-packet flux scan over the packet bulk (rho > bulk_frac of
// the peak): classical-backflow probe.
struct FluxScan {
    double min_current_bulk = 0.0;
    double max_abs_current = 0.0;
    double negative_fraction_bulk = 0.0;  // fraction of bulk points with J < 0
};
FluxScan single_packet_flux_scan(const Scenario& scenario, const ProtocolOptions& opts,
                                 double bulk_frac = 0.05);

// Free expansion of the (imaginary-time) ground state: relative error of the
// fitted width against sqrt(1 + t^2).
double free_expansion_width_error(double t_natural, int n_points);

// Dipole evolution at dt, dt/2, dt/4 against a dt/32 reference; returns the
// successive L2-error ratios (expected ~4 for second-order Strang splitting).
std::vector<double> convergence_order_ratios(int n_points, double dt_base = 4e-3);

// Randomized-scenario scan of the (rho < rho_crit) <=> (J < 0) equivalence on
// quantum-regime grid points. Points within 1e-12 of either boundary are
// counted separately (roundoff-ambiguous), not as exceptions.
struct EquivalenceStats {
    long long points_checked = 0;
    long long exceptions = 0;
    long long boundary_skipped = 0;
};
EquivalenceStats backflow_equivalence_scan(std::uint32_t seed, int n_scenarios);

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;  // measured
    double bound = 0.0;  // threshold it was compared against
    std::string detail;
};

struct ValidateOptions {
    bool quick = false;
    double dt = 1e-3;
};

// The cmd_validate suite: analytic-vs-oracle checks plus invariant scans.
std::vector<CheckResult> run_validation_suite(const Scenario& scenario,
                                              const ValidateOptions& opts);

}  // namespace backflow
