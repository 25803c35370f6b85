#include "backflow/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace backflow::oracle {

namespace {
// FFTW's planner is not thread-safe; executions on separate plans are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

std::vector<double> GridSpec::coordinates() const {
    std::vector<double> x(n_points);
    const double h = dx();
    for (int i = 0; i < n_points; ++i) x[i] = x_min + i * h;
    return x;
}

std::vector<double> GridSpec::wavenumbers() const {
    std::vector<double> k(n_points);
    const double dk = 2.0 * constants::pi / length();
    for (int i = 0; i < n_points; ++i) {
        const int idx = (i < n_points / 2) ? i : i - n_points;
        k[i] = dk * idx;
    }
    return k;
}

struct Simulation::Fft {
    int n = 0;
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    std::vector<std::complex<double>> plan_buffer;

    explicit Fft(int n_points) : n(n_points), plan_buffer(n_points) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        auto* buf = reinterpret_cast<fftw_complex*>(plan_buffer.data());
        forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        inverse = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!forward || !inverse) throw std::runtime_error("FFTW plan creation failed");
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }

    void run_forward(std::complex<double>* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(forward, p, p);
    }
    void run_inverse(std::complex<double>* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(inverse, p, p);
        // FFTW leaves the inverse unnormalized.
    }
};

Simulation::Simulation(const GridSpec& grid, std::vector<std::complex<double>> psi, double g)
    : grid_(grid), psi_(std::move(psi)), g_(g), fft_(std::make_unique<Fft>(grid.n_points)) {
    if (grid_.n_points < 2 || (grid_.n_points & (grid_.n_points - 1)) != 0) {
        throw std::invalid_argument("GridSpec: n_points must be a power of two");
    }
    if (static_cast<int>(psi_.size()) != grid_.n_points) {
        throw std::invalid_argument("Simulation: field size does not match grid");
    }
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

double Simulation::norm() const {
    double acc = 0.0;
    for (const auto& c : psi_) acc += std::norm(c);
    return acc * grid_.dx();
}

std::vector<double> Simulation::density() const {
    std::vector<double> rho(psi_.size());
    for (std::size_t i = 0; i < psi_.size(); ++i) rho[i] = std::norm(psi_[i]);
    return rho;
}

void Simulation::imaginary_step(const Potential& potential, double dtau, int steps,
                                double target_norm) {
    if (!(dtau > 0.0)) throw std::invalid_argument("imaginary_step: dtau must be positive");
    const auto x = grid_.coordinates();
    const auto k = grid_.wavenumbers();
    const int n = grid_.n_points;
    std::vector<double> v_ext(n), kinetic_decay(n);
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        v_ext[i] = potential(x[i]);
        kinetic_decay[i] = std::exp(-0.5 * k[i] * k[i] * dtau) * inv_n;
    }
    auto half = [&]() {
        for (int i = 0; i < n; ++i) {
            const double v = v_ext[i] + g_ * std::norm(psi_[i]);
            psi_[i] *= std::exp(-0.5 * dtau * v);
        }
    };
    for (int step = 0; step < steps; ++step) {
        half();
        fft_->run_forward(psi_.data());
        for (int i = 0; i < n; ++i) psi_[i] *= kinetic_decay[i];
        fft_->run_inverse(psi_.data());
        half();
        const double scale = std::sqrt(target_norm / norm());
        for (auto& c : psi_) c *= scale;
    }
}

std::vector<double> Simulation::momentum_density() const {
    std::vector<std::complex<double>> psik = psi_;
    fft_->run_forward(psik.data());
    const double dx = grid_.dx();
    const double scale = dx * dx / (2.0 * constants::pi);
    std::vector<double> out(psik.size());
    for (std::size_t i = 0; i < psik.size(); ++i) out[i] = scale * std::norm(psik[i]);
    return out;
}

std::vector<double> Simulation::current() const {
    const auto k = grid_.wavenumbers();
    std::vector<std::complex<double>> dpsi = psi_;
    fft_->run_forward(dpsi.data());
    const double inv_n = 1.0 / grid_.n_points;
    for (int i = 0; i < grid_.n_points; ++i) {
        dpsi[i] *= std::complex<double>(0.0, k[i]) * inv_n;
    }
    fft_->run_inverse(dpsi.data());
    std::vector<double> j(psi_.size());
    for (std::size_t i = 0; i < psi_.size(); ++i) {
        j[i] = std::imag(std::conj(psi_[i]) * dpsi[i]);
    }
    return j;
}

double Simulation::energy(const Potential& potential) const {
    const auto k = grid_.wavenumbers();
    std::vector<std::complex<double>> psik = psi_;
    fft_->run_forward(psik.data());
    double kinetic = 0.0;
    for (int i = 0; i < grid_.n_points; ++i) {
        kinetic += 0.5 * k[i] * k[i] * std::norm(psik[i]);
    }
    // Parseval: sum|psik|^2 = n sum|psi|^2; scale kinetic to the x-integral.
    const double dx = grid_.dx();
    kinetic *= dx / grid_.n_points;

    const auto x = grid_.coordinates();
    double potential_term = 0.0;
    for (int i = 0; i < grid_.n_points; ++i) {
        const double rho = std::norm(psi_[i]);
        potential_term += (potential(x[i]) + 0.5 * g_ * rho) * rho;
    }
    potential_term *= dx;
    return kinetic + potential_term;
}

double Simulation::mean_position() const {
    const auto x = grid_.coordinates();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid_.n_points; ++i) {
        const double rho = std::norm(psi_[i]);
        num += x[i] * rho;
        den += rho;
    }
    return num / den;
}

double Simulation::mean_momentum() const {
    const auto k = grid_.wavenumbers();
    std::vector<std::complex<double>> psik = psi_;
    fft_->run_forward(psik.data());
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid_.n_points; ++i) {
        const double w = std::norm(psik[i]);
        num += k[i] * w;
        den += w;
    }
    return num / den;
}

double Simulation::fitted_width() const {
    const auto x = grid_.coordinates();
    const double xc = mean_position();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid_.n_points; ++i) {
        const double rho = std::norm(psi_[i]);
        num += (x[i] - xc) * (x[i] - xc) * rho;
        den += rho;
    }
    return std::sqrt(2.0 * num / den);
}

void Simulation::check_boundary_density() const {
    const int n = grid_.n_points;
    const int edge = std::max(1, n / 50);
    double edge_max = 0.0, peak = 0.0;
    for (int i = 0; i < n; ++i) {
        const double rho = std::norm(psi_[i]);
        peak = std::max(peak, rho);
        if (i < edge || i >= n - edge) edge_max = std::max(edge_max, rho);
    }
    if (edge_max > 1e-10 * peak) {
        std::ostringstream msg;
        msg << "evolve: boundary density " << edge_max / peak
            << " of peak exceeds 1e-10; increase x_span (grid [" << grid_.x_min << ", "
            << grid_.x_max << "])";
        throw std::runtime_error(msg.str());
    }
}

void Simulation::evolve(double duration, const Potential& potential, double dt) {
    if (duration == 0.0) return;
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    const double direction = (duration > 0.0) ? 1.0 : -1.0;
    const double span = std::abs(duration);
    const int n_steps = std::max(1, static_cast<int>(std::ceil(span / dt)));
    const double h = direction * span / n_steps;

    const auto x = grid_.coordinates();
    const auto k = grid_.wavenumbers();
    const int n = grid_.n_points;

    std::vector<std::complex<double>> kinetic_phase(n);
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        kinetic_phase[i] =
            std::polar(inv_n, -0.5 * k[i] * k[i] * h);  // includes inverse-FFT norm
    }
    std::vector<double> v_ext(n);
    for (int i = 0; i < n; ++i) v_ext[i] = potential(x[i]);

    auto half_potential = [&]() {
        if (g_ == 0.0) {
            for (int i = 0; i < n; ++i) {
                psi_[i] *= std::polar(1.0, -0.5 * h * v_ext[i]);
            }
        } else {
            for (int i = 0; i < n; ++i) {
                const double v = v_ext[i] + g_ * std::norm(psi_[i]);
                psi_[i] *= std::polar(1.0, -0.5 * h * v);
            }
        }
    };

    for (int step = 0; step < n_steps; ++step) {
        half_potential();
        fft_->run_forward(psi_.data());
        for (int i = 0; i < n; ++i) psi_[i] *= kinetic_phase[i];
        fft_->run_inverse(psi_.data());
        half_potential();
        if ((step & 511) == 511) check_boundary_density();
    }
    time_ += direction * span;
    check_boundary_density();
}

void Simulation::bragg_kick(const BraggConfig& bragg) {
    const double norm_before = norm();
    const auto x = grid_.coordinates();
    for (int i = 0; i < grid_.n_points; ++i) {
        psi_[i] *= bragg.a1 + bragg.a2 * std::polar(1.0, bragg.q * x[i] + bragg.phase);
    }
    const double scale = std::sqrt(norm_before / norm());
    for (auto& c : psi_) c *= scale;
}

Simulation Simulation::ground_state(const GridSpec& grid, const Potential& potential,
                                    double g, double norm, const GroundStateOptions& opts) {
    if (!(norm > 0.0)) throw std::invalid_argument("ground_state: norm must be positive");
    if (potential.kind == Potential::Kind::Free) {
        throw std::invalid_argument("ground_state: potential must be confining");
    }

    const auto x = grid.coordinates();
    const int n = grid.n_points;

    // Initial guess: TF ansatz when interacting, otherwise a unit Gaussian.
    std::vector<std::complex<double>> psi0(n);
    if (g > 0.0) {
        const double mu = 0.5 * std::pow(1.5 * norm * g, 2.0 / 3.0);
        for (int i = 0; i < n; ++i) {
            psi0[i] = std::sqrt(std::max(mu - potential(x[i]), 0.0) / g) + 1e-3;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double u = x[i] - potential.center;
            psi0[i] = std::exp(-0.5 * u * u);
        }
    }
    Simulation sim(grid, std::move(psi0), g);

    const auto k = grid.wavenumbers();
    std::vector<double> v_ext(n);
    for (int i = 0; i < n; ++i) v_ext[i] = potential(x[i]);

    auto renormalize = [&]() {
        const double scale = std::sqrt(norm / sim.norm());
        for (auto& c : sim.psi_) c *= scale;
    };
    renormalize();

    std::vector<double> dtaus;
    for (double dtau = opts.dtau_start;; dtau = std::max(dtau / opts.stage_shrink, opts.dtau_min)) {
        dtaus.push_back(dtau);
        if (dtau <= opts.dtau_min) break;
    }

    std::vector<std::complex<double>> prev(n);
    const double inv_n = 1.0 / n;
    for (double dtau : dtaus) {
        std::vector<double> kinetic_decay(n);
        for (int i = 0; i < n; ++i) {
            kinetic_decay[i] = std::exp(-0.5 * k[i] * k[i] * dtau) * inv_n;
        }
        double residual = 0.0;
        bool converged = false;
        for (int iter = 0; iter < opts.max_iter_per_stage; ++iter) {
            prev = sim.psi_;
            auto half = [&]() {
                for (int i = 0; i < n; ++i) {
                    const double v = v_ext[i] + g * std::norm(sim.psi_[i]);
                    sim.psi_[i] *= std::exp(-0.5 * dtau * v);
                }
            };
            half();
            sim.fft_->run_forward(sim.psi_.data());
            for (int i = 0; i < n; ++i) sim.psi_[i] *= kinetic_decay[i];
            sim.fft_->run_inverse(sim.psi_.data());
            half();
            renormalize();

            residual = 0.0;
            for (int i = 0; i < n; ++i) {
                residual = std::max(residual, std::abs(sim.psi_[i] - prev[i]));
            }
            residual /= dtau;
            if (residual < opts.residual_tol) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream msg;
            msg << "ground_state: stage dtau = " << dtau << " did not converge within "
                << opts.max_iter_per_stage << " iterations (residual " << residual << ")";
            throw std::runtime_error(msg.str());
        }
    }

    // Contract check: one more step at the final dtau must not move the energy.
    const double e_before = sim.energy(potential);
    {
        const double dtau = dtaus.back();
        std::vector<double> kinetic_decay(n);
        for (int i = 0; i < n; ++i) {
            kinetic_decay[i] = std::exp(-0.5 * k[i] * k[i] * dtau) * inv_n;
        }
        auto half = [&]() {
            for (int i = 0; i < n; ++i) {
                const double v = v_ext[i] + g * std::norm(sim.psi_[i]);
                sim.psi_[i] *= std::exp(-0.5 * dtau * v);
            }
        };
        half();
        sim.fft_->run_forward(sim.psi_.data());
        for (int i = 0; i < n; ++i) sim.psi_[i] *= kinetic_decay[i];
        sim.fft_->run_inverse(sim.psi_.data());
        half();
        renormalize();
    }
    const double e_after = sim.energy(potential);
    if (std::abs(e_after - e_before) > opts.energy_tol * std::max(1.0, std::abs(e_before))) {
        std::ostringstream msg;
        msg << "ground_state: per-step energy change " << std::abs(e_after - e_before)
            << " exceeds " << opts.energy_tol;
        throw std::runtime_error(msg.str());
    }

    // Remove the arbitrary global phase so the field is real and positive.
    double max_rho = 0.0;
    std::complex<double> at_peak = 1.0;
    for (const auto& c : sim.psi_) {
        if (std::norm(c) > max_rho) {
            max_rho = std::norm(c);
            at_peak = c;
        }
    }
    const std::complex<double> dephase = std::conj(at_peak) / std::abs(at_peak);
    for (auto& c : sim.psi_) c *= dephase;

    sim.time_ = 0.0;
    return sim;
}

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

void save_checkpoint(const Simulation& sim, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    const char magic[8] = {'B', 'F', 'C', 'K', 'P', 'T', '0', '1'};
    out.write(magic, 8);
    const std::int64_t n = sim.grid().n_points;
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    const double header[4] = {sim.grid().x_min, sim.grid().x_max, sim.time(),
                              sim.nonlinearity()};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(sim.psi().data()),
              static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

Simulation load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "BFCKPT01", 8) != 0) {
        throw std::runtime_error("load_checkpoint: bad magic in " + path.string());
    }
    std::int64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    double header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || n < 2) throw std::runtime_error("load_checkpoint: truncated header");
    GridSpec grid{static_cast<int>(n), header[0], header[1]};
    std::vector<std::complex<double>> psi(static_cast<std::size_t>(n));
    in.read(reinterpret_cast<char*>(psi.data()),
            static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
    if (!in) throw std::runtime_error("load_checkpoint: truncated field data");
    Simulation sim(grid, std::move(psi), header[3]);
    sim.time_ = header[2];
    return sim;
}

}  // namespace backflow::oracle
