#include "backflow/validate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

namespace backflow {

std::vector<double> spectral_derivative(const std::vector<double>& values, double length) {
    const int n = static_cast<int>(values.size());
    std::vector<std::complex<double>> work(values.begin(), values.end());
    auto* buf = reinterpret_cast<fftw_complex*>(work.data());
    fftw_plan fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_plan inv = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_execute_dft(fwd, buf, buf);
    const double dk = 2.0 * constants::pi / length;
    for (int i = 0; i < n; ++i) {
        const int idx = (i < n / 2) ? i : i - n;
        work[i] *= std::complex<double>(0.0, dk * idx / n);
    }
    fftw_execute_dft(inv, buf, buf);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = work[i].real();
    return out;
}

OracleComparison compare_protocol_to_analytic(const Scenario& scenario,
                                              const ProtocolOptions& opts, double delta) {
    oracle::Simulation sim = run_protocol(scenario, opts);
    const auto xs = sim.grid().coordinates();
    const WavepacketState packet = scenario.packet();
    const BraggConfig bragg = scenario.bragg();

    const auto rho_num = sim.density();
    const auto j_num = sim.current();
    double rho_max = 0.0, j_max = 0.0, rho_err = 0.0, j_err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double rho_a = total_density(xs[i], packet, bragg);
        const double j_a = total_current(xs[i], packet, bragg);
        rho_max = std::max(rho_max, rho_a);
        j_max = std::max(j_max, std::abs(j_a));
        rho_err = std::max(rho_err, std::abs(rho_num[i] - rho_a));
        j_err = std::max(j_err, std::abs(j_num[i] - j_a));
    }

    OracleComparison cmp;
    cmp.rho_linf_norm = rho_err / rho_max;
    cmp.current_linf_norm = j_err / j_max;

    // Continuity: centered time difference around the kicked state. Free
    // evolution is spectrally exact, so delta can be small without drift.
    sim.evolve(delta, oracle::Potential::free_space(), delta);
    const auto rho_plus = sim.density();
    sim.evolve(-2.0 * delta, oracle::Potential::free_space(), delta);
    const auto rho_minus = sim.density();

    std::vector<double> drho_dt(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        drho_dt[i] = (rho_plus[i] - rho_minus[i]) / (2.0 * delta);
    }
    const auto dj_dx = spectral_derivative(j_num, sim.grid().length());
    double residual = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        residual = std::max(residual, std::abs(drho_dt[i] + dj_dx[i]));
        scale = std::max(scale, std::abs(drho_dt[i]));
    }
    cmp.continuity_residual = residual / scale;
    return cmp;
}

FluxScan single_packet_flux_scan(const Scenario& scenario, const ProtocolOptions& opts,
                                 double bulk_frac) {
    ProtocolOptions no_kick = opts;
    no_kick.apply_kick = false;
    oracle::Simulation sim = run_protocol(scenario, no_kick);

    const auto rho = sim.density();
    const auto j = sim.current();
    const double peak = *std::max_element(rho.begin(), rho.end());

    FluxScan scan;
    long long bulk = 0, negative = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        scan.max_abs_current = std::max(scan.max_abs_current, std::abs(j[i]));
        if (rho[i] > bulk_frac * peak) {
            ++bulk;
            scan.min_current_bulk = std::min(scan.min_current_bulk, j[i]);
            if (j[i] < 0.0) ++negative;
        }
    }
    scan.negative_fraction_bulk = bulk > 0 ? static_cast<double>(negative) / bulk : 0.0;
    return scan;
}

double free_expansion_width_error(double t_natural, int n_points) {
    const double b_end = std::sqrt(1.0 + t_natural * t_natural);
    oracle::GridSpec grid;
    grid.n_points = n_points;
    grid.x_min = -5.5 * b_end;
    grid.x_max = 5.5 * b_end;

    oracle::GroundStateOptions gs;
    gs.dtau_min = 4e-3;  // width bias O(dtau^2) ~ 1e-5, well under the 0.1% check
    oracle::Simulation sim =
        oracle::Simulation::ground_state(grid, oracle::Potential::harmonic(0.0), 0.0, 1.0, gs);
    sim.evolve(t_natural, oracle::Potential::free_space());
    return std::abs(sim.fitted_width() / b_end - 1.0);
}

std::vector<double> convergence_order_ratios(int n_points, double dt_base) {
    oracle::GridSpec grid;
    grid.n_points = n_points;
    grid.x_min = -14.0;
    grid.x_max = 14.0;
    const auto x = grid.coordinates();

    auto displaced_gaussian = [&]() {
        std::vector<std::complex<double>> psi(x.size());
        constexpr double inv_pi_quarter = 0.7511255444649425;  // pi^{-1/4}
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = x[i] + 2.0;
            psi[i] = std::exp(-0.5 * u * u) * inv_pi_quarter;
        }
        return psi;
    };
    const oracle::Potential trap = oracle::Potential::harmonic(0.0);
    const double duration = 1.0;

    auto run = [&](double dt) {
        oracle::Simulation sim(grid, displaced_gaussian(), 0.0);
        sim.evolve(duration, trap, dt);
        return sim.psi();
    };
    const auto reference = run(dt_base / 32.0);
    auto l2_error = [&](const std::vector<std::complex<double>>& psi) {
        double acc = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) acc += std::norm(psi[i] - reference[i]);
        return std::sqrt(acc * grid.dx());
    };

    std::vector<double> errors;
    for (double dt : {dt_base, dt_base / 2.0, dt_base / 4.0}) errors.push_back(l2_error(run(dt)));
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) ratios.push_back(errors[i] / errors[i + 1]);
    return ratios;
}

EquivalenceStats backflow_equivalence_scan(std::uint32_t seed, int n_scenarios) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EquivalenceStats stats;
    for (int s = 0; s < n_scenarios; ++s) {
        const bool tf = unit(rng) < 0.4;
        const double d = 1.5 + 2.5 * unit(rng);
        const double t = 1.0 + 9.0 * unit(rng);
        const double alpha = 0.5 + 5.5 * unit(rng);
        const double a2 = 0.05 + 0.9 * unit(rng);
        const double varphi = 2.0 * constants::pi * unit(rng);

        InitialProfile init;
        if (tf) {
            const double mu = 2.0 + 8.0 * unit(rng);
            const double g = (2.0 / 3.0) * std::pow(2.0 * mu, 1.5);
            init = InitialProfile::thomas_fermi(1.0, g);
        } else {
            init = InitialProfile::gaussian();
        }
        const WavepacketState packet = WavepacketState::at_time(init, d, t);
        const BraggConfig bragg(a2, alpha * d, varphi);
        const FieldProfile fp = profile(packet, bragg, ProfileGrid{});

        double j_scale = 0.0, rho_scale = 0.0;
        for (std::size_t i = 0; i < fp.size(); ++i) {
            j_scale = std::max(j_scale, std::abs(fp.current[i]));
            rho_scale = std::max(rho_scale, fp.rho[i]);
        }
        for (std::size_t i = 0; i < fp.size(); ++i) {
            if (!(fp.eta[i] > 0.0)) continue;
            const double crit = fp.rho_crit[i];
            if (std::abs(fp.current[i]) < 1e-12 * j_scale ||
                std::abs(fp.rho[i] - crit) < 1e-12 * rho_scale) {
                ++stats.boundary_skipped;
                continue;
            }
            ++stats.points_checked;
            const bool below = fp.rho[i] < crit;
            const bool backflow = fp.current[i] < 0.0;
            if (below != backflow) ++stats.exceptions;
        }
    }
    return stats;
}

std::vector<CheckResult> run_validation_suite(const Scenario& scenario,
                                              const ValidateOptions& opts) {
    std::vector<CheckResult> results;
    auto push = [&](const std::string& name, double value, double bound,
                    const std::string& detail = "") {
        CheckResult r;
        r.name = name;
        r.value = value;
        r.bound = bound;
        r.pass = value <= bound;
        r.detail = detail;
        results.push_back(r);
    };

    const int protocol_n = opts.quick ? 1024 : 8192;
    ProtocolOptions popts;
    popts.n_points = protocol_n;
    popts.dt = opts.dt;
    popts.ground_state.dtau_min = 4e-3;  // 1e-5-level bias, thresholds are 1e-2

    {
        const OracleComparison cmp = compare_protocol_to_analytic(scenario, popts);
        push("end-to-end density Linf/rho_max", cmp.rho_linf_norm, 1e-2);
        push("end-to-end current Linf/max|J|", cmp.current_linf_norm, 2e-2);
        push("continuity residual", cmp.continuity_residual, 1e-4);
    }
    {
        const double err = free_expansion_width_error(scenario.expansion_natural(),
                                                      opts.quick ? 1024 : 2048);
        push("free-expansion width error", err, 1e-3);
    }
    {
        const auto ratios = convergence_order_ratios(opts.quick ? 1024 : 2048,
                                                     4.0 * opts.dt);
        double worst = ratios.empty() ? 0.0 : ratios.front();
        for (double r : ratios) {
            if (std::abs(r - 4.0) > std::abs(worst - 4.0)) worst = r;
        }
        std::ostringstream detail;
        detail << "ratios:";
        for (double r : ratios) detail << " " << r;
        const bool ok = !ratios.empty() &&
                        std::all_of(ratios.begin(), ratios.end(),
                                    [](double r) { return r >= 3.0 && r <= 5.5; });
        CheckResult r;
        r.name = "convergence order (dt halving error ratio ~4)";
        r.value = worst;
        r.bound = 5.5;
        r.pass = ok;
        r.detail = detail.str();
        results.push_back(r);
    }
    {
        // Norm conservation over 1e4 harmonic steps (unitary stepping).
        oracle::GridSpec grid{opts.quick ? 1024 : 2048, -10.0, 10.0};
        const auto x = grid.coordinates();
        std::vector<std::complex<double>> psi(x.size());
        constexpr double inv_pi_quarter = 0.7511255444649425;  // pi^{-1/4}
        for (std::size_t i = 0; i < x.size(); ++i) {
            psi[i] = std::exp(-0.5 * x[i] * x[i]) * inv_pi_quarter;
        }
        oracle::Simulation sim(grid, std::move(psi), 0.0);
        const double norm0 = sim.norm();
        sim.evolve(10.0, oracle::Potential::harmonic(0.0), 1e-3);
        push("norm drift per 1e4 steps", std::abs(sim.norm() - norm0) / norm0, 1e-10);
    }
    {
        // Energy conservation over a full dipole period.
        oracle::GridSpec grid{opts.quick ? 1024 : 2048, -14.0, 14.0};
        const auto x = grid.coordinates();
        std::vector<std::complex<double>> psi(x.size());
        constexpr double inv_pi_quarter = 0.7511255444649425;  // pi^{-1/4}
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = x[i] + 2.0;
            psi[i] = std::exp(-0.5 * u * u) * inv_pi_quarter;
        }
        oracle::Simulation sim(grid, std::move(psi), 0.0);
        const oracle::Potential trap = oracle::Potential::harmonic(0.0);
        const double e0 = sim.energy(trap);
        sim.evolve(2.0 * constants::pi, trap, opts.dt);
        push("energy drift over dipole period", std::abs(sim.energy(trap) - e0) / e0, 1e-8);
    }
    {
        // Invariant: the two current expressions agree pointwise.
        std::mt19937 rng(7u);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const WavepacketState packet = WavepacketState::at_time(
                InitialProfile::gaussian(), 1.5 + 2.5 * unit(rng), 0.5 + 8.0 * unit(rng));
            const BraggConfig bragg(unit(rng), (0.5 + 5.0 * unit(rng)) * packet.k1,
                                    2.0 * constants::pi * unit(rng));
            const double x = packet.center() + (unit(rng) - 0.5) * 6.0 * packet.scaling.b;
            const double j1 = total_current(x, packet, bragg);
            const double j2 = total_current_from_density(x, packet, bragg);
            const double scale = std::max({std::abs(j1), std::abs(j2), 1e-300});
            worst = std::max(worst, std::abs(j1 - j2) / scale);
        }
        push("current-form agreement (relative)", worst, 1e-12);
    }
    {
        const EquivalenceStats stats = backflow_equivalence_scan(12345u, opts.quick ? 4 : 10);
        std::ostringstream detail;
        detail << stats.points_checked << " points, " << stats.boundary_skipped
               << " boundary-skipped";
        CheckResult r;
        r.name = "backflow equivalence (rho<crit <=> J<0)";
        r.value = static_cast<double>(stats.exceptions);
        r.bound = 0.0;
        r.pass = stats.exceptions == 0 && stats.points_checked > 0;
        r.detail = detail.str();
        results.push_back(r);
    }
    {
        // varphi covariance: shifting varphi by delta and x by -delta/q leaves
        // rho and J unchanged modulo the translated envelope and phase
        // gradient, i.e. the fringe factors rho/phi^2 and J/phi^2 - grad_theta
        // rho/phi^2 are exactly covariant.
        const WavepacketState packet = scenario.packet();
        const BraggConfig bragg = scenario.bragg();
        const double delta = 1.2345;
        const BraggConfig shifted(scenario.bragg_a2, bragg.q, bragg.phase + delta);
        auto fringe = [&](double x, const BraggConfig& cfg, double& density_part,
                          double& kick_part) {
            const double phi2 = packet.envelope(x) * packet.envelope(x);
            density_part = total_density(x, packet, cfg) / phi2;
            kick_part = total_current(x, packet, cfg) / phi2 -
                        packet.phase_gradient(x) * density_part;
        };
        double worst = 0.0;
        for (int i = -40; i <= 40; ++i) {
            const double x = packet.center() + 0.15 * i;
            double rho_a, jk_a, rho_b, jk_b;
            fringe(x, bragg, rho_a, jk_a);
            fringe(x - delta / bragg.q, shifted, rho_b, jk_b);
            worst = std::max({worst, std::abs(rho_a - rho_b), std::abs(jk_a - jk_b)});
        }
        push("varphi-shift covariance of fringe factors", worst, 1e-12);
    }
    return results;
}

}  // namespace backflow
