// Independent split-step (Strang/spectral) propagator for the 1D
// Schrodinger / Gross-Pitaevskii equation in natural units
// (hbar = m = omega_x = 1). Used to validate every analytic result:
// ground-state preparation (imaginary time), dipole oscillation after a trap
// shift, free expansion, and the instantaneous Bragg kick.
#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <vector>

#include "backflow/interference.hpp"

namespace backflow::oracle {

struct GridSpec {
    int n_points = 4096;   // power of two
    double x_min = -40.0;  // a_x
    double x_max = 40.0;

    double length() const { return x_max - x_min; }
    double dx() const { return length() / n_points; }
    std::vector<double> coordinates() const;
    std::vector<double> wavenumbers() const;  // FFT ordering
};

struct Potential {
    enum class Kind { Free, Harmonic };
    Kind kind = Kind::Free;
    double center = 0.0;  // harmonic: V = (x - center)^2 / 2

    static Potential free_space() { return {Kind::Free, 0.0}; }
    static Potential harmonic(double center) { return {Kind::Harmonic, center}; }
    double operator()(double x) const {
        if (kind == Kind::Free) return 0.0;
        const double u = x - center;
        return 0.5 * u * u;
    }
};

struct GroundStateOptions {
    double dtau_start = 0.1;
    double dtau_min = 4e-4;       // final-stage step; bias in the state is O(dtau^2)
    double stage_shrink = 5.0;
    double residual_tol = 1e-10;  // max|dpsi|/dtau stage-stopping criterion
    double energy_tol = 1e-12;    // per-step energy change verified at the end
    int max_iter_per_stage = 400000;
};

// One simulation instance: complex field + per-instance FFT workspace.
// Single-owner (not concurrently mutable); independent instances may run in
// parallel. Movable, not copyable (FFTW plans).
class Simulation {
  public:
    Simulation(const GridSpec& grid, std::vector<std::complex<double>> psi, double g);
    ~Simulation();
    Simulation(Simulation&&) noexcept;
    Simulation& operator=(Simulation&&) noexcept;
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    // Imaginary-time propagation with a staged step-size schedule; throws
    // (with the residual) if a stage hits max_iter, and verifies the final
    // per-step energy change against opts.energy_tol.
    static Simulation ground_state(const GridSpec& grid, const Potential& potential,
                                   double g, double norm,
                                   const GroundStateOptions& opts = {});

    // Strang-split real-time evolution by `duration` (dt is adjusted down so
    // an integer number of steps lands exactly on `duration`). Density at the
    // outer 2% of the grid is checked against 1e-10 of the peak.
    void evolve(double duration, const Potential& potential, double dt = 1e-3);

    // Multiplies by (A1 + A2 e^{i(qx + varphi)}) and renormalizes.
    void bragg_kick(const BraggConfig& bragg);

    // Further imaginary-time relaxation (Strang splitting, renormalized to
    // `norm` each step). ground_state is a staged-step wrapper around this.
    void imaginary_step(const Potential& potential, double dtau, int steps, double norm);

    std::vector<double> density() const;
    // |psi_hat(k)|^2 in FFT wavenumber order, normalized so that the
    // k-integral equals the norm.
    std::vector<double> momentum_density() const;
    // J = Im[psi* d(psi)/dx], spectral derivative.
    std::vector<double> current() const;
    double norm() const;  // integral of |psi|^2
    double energy(const Potential& potential) const;
    double mean_position() const;
    double mean_momentum() const;
    // sqrt(2 <(x - <x>)^2>): equals the scaling parameter b for the Gaussian.
    double fitted_width() const;

    double time() const { return time_; }
    double nonlinearity() const { return g_; }
    const GridSpec& grid() const { return grid_; }
    const std::vector<std::complex<double>>& psi() const { return psi_; }
    std::vector<std::complex<double>>& psi() { return psi_; }

    friend Simulation load_checkpoint(const std::filesystem::path& path);

  private:
    struct Fft;
    GridSpec grid_;
    std::vector<std::complex<double>> psi_;
    double g_ = 0.0;
    double time_ = 0.0;
    std::unique_ptr<Fft> fft_;

    void check_boundary_density() const;
};

// Binary checkpoint: 8-byte magic "BFCKPT01", then little-endian int64
// n_points and f64 x_min, x_max, time, g, followed by n interleaved
// (re, im) f64 samples.
void save_checkpoint(const Simulation& sim, const std::filesystem::path& path);
Simulation load_checkpoint(const std::filesystem::path& path);

}  // namespace backflow::oracle
