#include "backflow/wavepacket.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace backflow {

namespace {

// Cash-Karp embedded RK4(5) for the TF scaling law b'' = 1/b^2.
// State y = (b, bdot). Tolerances chosen so the energy-like monitor
// bdot^2/2 + 1/b drifts by < 1e-10 relative over t ~ 100.
struct ScalingOde {
    static std::array<double, 2> rhs(const std::array<double, 2>& y) {
        return {y[1], 1.0 / (y[0] * y[0])};
    }
};

std::array<double, 2> integrate_tf(double t_end) {
    constexpr double rtol = 1e-10;
    constexpr double atol = 1e-12;

    std::array<double, 2> y{1.0, 0.0};
    double t = 0.0;
    double h = std::min(1e-3, t_end);
    if (t_end == 0.0) return y;

    // Cash-Karp tableau
    constexpr double b21 = 1.0 / 5.0;
    constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
    constexpr double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
    constexpr double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0,
                     b54 = 35.0 / 27.0;
    constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                     b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                     b65 = 253.0 / 4096.0;
    constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                     c6 = 512.0 / 1771.0;
    constexpr double d1 = 2825.0 / 27648.0, d3 = 18575.0 / 48384.0,
                     d4 = 13525.0 / 55296.0, d5 = 277.0 / 14336.0, d6 = 1.0 / 4.0;

    int steps = 0;
    while (t < t_end) {
        if (++steps > 1000000) {
            throw std::runtime_error("TF scaling ODE: step limit exceeded");
        }
        h = std::min(h, t_end - t);

        auto k1 = ScalingOde::rhs(y);
        std::array<double, 2> y2{y[0] + h * b21 * k1[0], y[1] + h * b21 * k1[1]};
        auto k2 = ScalingOde::rhs(y2);
        std::array<double, 2> y3{y[0] + h * (b31 * k1[0] + b32 * k2[0]),
                                 y[1] + h * (b31 * k1[1] + b32 * k2[1])};
        auto k3 = ScalingOde::rhs(y3);
        std::array<double, 2> y4{y[0] + h * (b41 * k1[0] + b42 * k2[0] + b43 * k3[0]),
                                 y[1] + h * (b41 * k1[1] + b42 * k2[1] + b43 * k3[1])};
        auto k4 = ScalingOde::rhs(y4);
        std::array<double, 2> y5{
            y[0] + h * (b51 * k1[0] + b52 * k2[0] + b53 * k3[0] + b54 * k4[0]),
            y[1] + h * (b51 * k1[1] + b52 * k2[1] + b53 * k3[1] + b54 * k4[1])};
        auto k5 = ScalingOde::rhs(y5);
        std::array<double, 2> y6{
            y[0] + h * (b61 * k1[0] + b62 * k2[0] + b63 * k3[0] + b64 * k4[0] +
                        b65 * k5[0]),
            y[1] + h * (b61 * k1[1] + b62 * k2[1] + b63 * k3[1] + b64 * k4[1] +
                        b65 * k5[1])};
        auto k6 = ScalingOde::rhs(y6);

        std::array<double, 2> y_next, y_low;
        for (int i = 0; i < 2; ++i) {
            y_next[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
            y_low[i] = y[i] + h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                   d6 * k6[i]);
        }

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_next[i]));
            err = std::max(err, std::abs(y_next[i] - y_low[i]) / scale);
        }

        if (err <= 1.0) {
            t += h;
            y = y_next;
        }
        const double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return y;
}

}  // namespace

InitialProfile InitialProfile::gaussian() {
    InitialProfile p;
    p.regime = Regime::NonInteracting;
    p.width_r0 = 1.0;
    p.norm = 1.0;
    return p;
}

InitialProfile InitialProfile::thomas_fermi(double n_atoms, double g1d_natural) {
    if (!(n_atoms > 0.0)) throw std::invalid_argument("thomas_fermi: n_atoms must be positive");
    if (!(g1d_natural > 0.0)) throw std::invalid_argument("thomas_fermi: g1d must be positive");
    InitialProfile p;
    p.regime = Regime::ThomasFermi;
    p.g1d = g1d_natural;
    // Normalization over the support gives (2 mu)^{3/2} = 3 N g / 2.
    p.chem_potential = 0.5 * std::pow(1.5 * n_atoms * g1d_natural, 2.0 / 3.0);
    p.width_r0 = std::sqrt(2.0 * p.chem_potential);
    p.norm = n_atoms;
    return p;
}

double InitialProfile::psi0(double x) const {
    if (regime == Regime::NonInteracting) {
        constexpr double inv_pi_quarter = 0.7511255444649425;  // pi^{-1/4}
        return std::exp(-0.5 * x * x) * inv_pi_quarter;
    }
    // max(.,0) kills negative rounding at the support edge.
    const double density = std::max(chem_potential - 0.5 * x * x, 0.0) / g1d;
    return std::sqrt(density);
}

ScalingState scaling_evolve(Regime regime, double t) {
    if (t < 0.0) throw std::invalid_argument("scaling_evolve: t must be non-negative");
    ScalingState s;
    s.time = t;
    if (regime == Regime::NonInteracting) {
        s.b = std::sqrt(1.0 + t * t);
        s.b_dot = t / s.b;
    } else {
        auto y = integrate_tf(t);
        s.b = y[0];
        s.b_dot = y[1];
    }
    return s;
}

WavepacketState WavepacketState::at_time(const InitialProfile& profile, double k1, double t) {
    WavepacketState w;
    w.profile = profile;
    w.scaling = scaling_evolve(profile.regime, t);
    w.k1 = k1;
    return w;
}

double WavepacketState::envelope(double x) const {
    const double b = scaling.b;
    return profile.psi0((x - center()) / b) / std::sqrt(b);
}

double WavepacketState::phase_gradient(double x) const {
    const double ratio = scaling.b_dot / scaling.b;
    return x * ratio + k1 * (1.0 - ratio * scaling.time);
}

double WavepacketState::flux(double x) const {
    const double phi = envelope(x);
    return phi * phi * phase_gradient(x);
}

std::optional<double> WavepacketState::x_minus() const {
    if (scaling.b_dot <= 0.0) return std::nullopt;
    return k1 * (scaling.time - scaling.b / scaling.b_dot);
}

}  // namespace backflow
