#include "backflow/interference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace backflow {

BraggConfig::BraggConfig(double a2_amplitude, double kick_q, double varphi) {
    if (!(a2_amplitude >= 0.0 && a2_amplitude <= 1.0)) {
        std::ostringstream msg;
        msg << "BraggConfig: A2 must lie in [0,1] (got " << a2_amplitude << ")";
        throw std::invalid_argument(msg.str());
    }
    if (!(kick_q > 0.0)) throw std::invalid_argument("BraggConfig: q must be positive");
    a2 = a2_amplitude;
    a1 = std::sqrt(1.0 - a2 * a2);
    q = kick_q;
    phase = varphi;
}

BraggConfig BraggConfig::from_amplitudes(double a1_in, double a2_in, double kick_q,
                                         double varphi) {
    if (a1_in < 0.0 || a2_in < 0.0) {
        throw std::invalid_argument("BraggConfig: amplitudes must be non-negative");
    }
    const double s = std::hypot(a1_in, a2_in);
    if (!(s > 0.0)) throw std::invalid_argument("BraggConfig: amplitudes are both zero");
    BraggConfig cfg(a2_in / s, kick_q, varphi);
    cfg.a1 = a1_in / s;  // exact normalized pair, not recomputed from a2
    return cfg;
}

double total_density(double x, const WavepacketState& packet, const BraggConfig& bragg) {
    const double phi = packet.envelope(x);
    const double c = std::cos(bragg.q * x + bragg.phase);
    return phi * phi *
           (bragg.a1 * bragg.a1 + bragg.a2 * bragg.a2 + 2.0 * bragg.a1 * bragg.a2 * c);
}

double total_current(double x, const WavepacketState& packet, const BraggConfig& bragg) {
    const double phi = packet.envelope(x);
    const double c = std::cos(bragg.q * x + bragg.phase);
    const double grad_theta = packet.phase_gradient(x);
    const double a1 = bragg.a1, a2 = bragg.a2;
    return phi * phi *
           (bragg.q * (a2 * a2 + a1 * a2 * c) +
            grad_theta * (a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * c));
}

double total_current_from_density(double x, const WavepacketState& packet,
                                  const BraggConfig& bragg) {
    const double phi = packet.envelope(x);
    const double rho = total_density(x, packet, bragg);
    const double grad_theta = packet.phase_gradient(x);
    return grad_theta * rho +
           0.5 * bragg.q * (rho + phi * phi * (bragg.a2 * bragg.a2 - bragg.a1 * bragg.a1));
}

double eta(double x, const WavepacketState& packet, const BraggConfig& bragg) {
    return 1.0 + 2.0 * packet.phase_gradient(x) / bragg.q;
}

std::optional<double> critical_density(double x, const WavepacketState& packet,
                                       const BraggConfig& bragg) {
    const double e = eta(x, packet, bragg);
    if (e <= 0.0) return std::nullopt;
    const double phi = packet.envelope(x);
    const double grad_theta = packet.phase_gradient(x);
    return bragg.q / (bragg.q + 2.0 * grad_theta) * phi * phi *
           (bragg.a1 * bragg.a1 - bragg.a2 * bragg.a2);
}

FieldProfile profile(const WavepacketState& packet, const BraggConfig& bragg,
                     const ProfileGrid& grid) {
    if (grid.n_points < 2) throw std::invalid_argument("profile: n_points must be >= 2");

    const double width = packet.envelope_width();
    double lo = grid.x_min.value_or(packet.center() - grid.half_widths * width);
    double hi = grid.x_max.value_or(packet.center() + grid.half_widths * width);
    if (!(hi > lo)) throw std::invalid_argument("profile: empty grid span");

    const double lambda = 2.0 * constants::pi / bragg.q;
    int n = grid.n_points;
    double dx = (hi - lo) / (n - 1);
    if (grid.auto_refine) {
        while (dx > lambda / 40.0) {
            if (n > (1 << 22)) {
                throw std::invalid_argument(
                    "profile: fringe resolution needs more than 2^22 points; shrink the span");
            }
            n *= 2;
            dx = (hi - lo) / (n - 1);
        }
    } else if (dx > lambda / 8.0) {
        std::ostringstream msg;
        msg << "profile: grid too coarse for fringes (dx = " << dx << ", lambda/8 = "
            << lambda / 8.0 << ")";
        throw std::invalid_argument(msg.str());
    }

    FieldProfile out;
    out.x.resize(n);
    out.rho.resize(n);
    out.current.resize(n);
    out.rho_crit.resize(n);
    out.eta.resize(n);
    out.regime.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = lo + i * dx;
        out.x[i] = x;
        out.rho[i] = total_density(x, packet, bragg);
        out.current[i] = total_current(x, packet, bragg);
        out.eta[i] = eta(x, packet, bragg);
        if (out.eta[i] > 0.0) {
            out.regime[i] = RegimeTag::QuantumWindow;
            out.rho_crit[i] = *critical_density(x, packet, bragg);
        } else {
            out.regime[i] = RegimeTag::ClassicalRegion;
            out.rho_crit[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

namespace {

// Vertex of the parabola through (x0-h, ym), (x0, y0), (x0+h, yp).
double parabolic_vertex(double x0, double h, double ym, double y0, double yp) {
    const double denom = ym - 2.0 * y0 + yp;
    if (denom == 0.0) return x0;
    const double shift = 0.5 * h * (ym - yp) / denom;
    return x0 + std::clamp(shift, -h, h);
}

double interp_zero(double x0, double y0, double x1, double y1) {
    return x0 + (x1 - x0) * (-y0) / (y1 - y0);
}

}  // namespace

std::vector<BackflowWindow> backflow_windows(const FieldProfile& p, double depth_floor) {
    std::vector<BackflowWindow> windows;
    const std::size_t n = p.size();
    if (n < 3) return windows;

    double j_scale = 0.0;
    for (double j : p.current) j_scale = std::max(j_scale, std::abs(j));
    const double floor = depth_floor * j_scale;

    std::size_t i = 0;
    while (i < n) {
        if (p.current[i] < 0.0) {
            const std::size_t start = i;
            while (i < n && p.current[i] < 0.0) ++i;
            const std::size_t stop = i;  // one past last negative sample

            BackflowWindow w;
            w.x_lo = (start > 0)
                         ? interp_zero(p.x[start - 1], p.current[start - 1], p.x[start],
                                       p.current[start])
                         : p.x[start];
            w.x_hi = (stop < n) ? interp_zero(p.x[stop - 1], p.current[stop - 1], p.x[stop],
                                              p.current[stop])
                                : p.x[n - 1];
            w.x_center = 0.5 * (w.x_lo + w.x_hi);

            std::size_t arg = start;
            for (std::size_t j = start; j < stop; ++j) {
                if (p.current[j] < p.current[arg]) arg = j;
            }
            w.j_min = p.current[arg];
            w.x_at_min = p.x[arg];
            if (arg > 0 && arg + 1 < n) {
                w.x_at_min = parabolic_vertex(p.x[arg], p.dx(), p.current[arg - 1],
                                              p.current[arg], p.current[arg + 1]);
            }
            if (std::abs(w.j_min) >= floor) windows.push_back(w);
        } else {
            ++i;
        }
    }
    return windows;
}

std::vector<double> density_minima(const FieldProfile& p) {
    std::vector<double> minima;
    const std::size_t n = p.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (p.rho[i] < p.rho[i - 1] && p.rho[i] < p.rho[i + 1]) {
            minima.push_back(
                parabolic_vertex(p.x[i], p.dx(), p.rho[i - 1], p.rho[i], p.rho[i + 1]));
        }
    }
    return minima;
}

}  // namespace backflow
