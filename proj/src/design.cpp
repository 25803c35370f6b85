#include "backflow/design.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "backflow/wavepacket.hpp"

namespace backflow {

double backflow_function(double alpha, double a2) {
    if (!(a2 >= 0.0 && a2 <= 1.0)) {
        std::ostringstream msg;
        msg << "backflow_function: A2 must lie in [0,1] (got " << a2 << ")";
        throw std::invalid_argument(msg.str());
    }
    if (!(alpha > 0.0)) throw std::invalid_argument("backflow_function: alpha must be positive");
    return 1.0 + alpha * a2 * a2 - (2.0 + alpha) * a2 * std::sqrt(1.0 - a2 * a2);
}

double optimal_a2(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("optimal_a2: alpha must be positive");
    // A2 = sin(u) turns the optimality equation into tan(2u) = (2+alpha)/alpha.
    return std::sin(0.5 * std::atan2(2.0 + alpha, alpha));
}

double optimal_a2_root(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("optimal_a2_root: alpha must be positive");
    auto stationarity = [alpha](double a2) {
        return 2.0 * alpha * a2 * std::sqrt(1.0 - a2 * a2) +
               (2.0 + alpha) * (2.0 * a2 * a2 - 1.0);
    };
    // stationarity(0) = -(2+alpha) < 0, stationarity(1/sqrt 2) = alpha > 0.
    double lo = 0.0, hi = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (stationarity(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

std::vector<GuardResult> classical_guards(const DesignInput& input, double t,
                                          double momentum_ratio_threshold) {
    if (!(input.d > 0.0)) throw std::invalid_argument("classical_guards: d must be positive");
    if (!(input.r0 > 0.0)) throw std::invalid_argument("classical_guards: r0 must be positive");

    std::vector<GuardResult> guards;
    const double v1 = input.d;  // v1 = omega_x d -> d in natural units

    {
        GuardResult g;
        g.name = "classical-backflow-finite-t";
        const ScalingState s = scaling_evolve(input.regime, t);
        if (s.b_dot > 0.0) {
            const double limit = v1 / s.b_dot;
            g.margin = limit / input.r0;
            g.pass = input.r0 < limit;
            std::ostringstream detail;
            detail << "R0 = " << input.r0 << " a_x vs v1/bdot(t) = " << limit << " a_x";
            g.detail = detail.str();
        } else {
            g.margin = std::numeric_limits<double>::infinity();
            g.pass = true;
            g.detail = "bdot = 0: no negative-flux region yet";
        }
        guards.push_back(g);
    }
    {
        GuardResult g;
        g.name = "classical-backflow-asymptotic";
        const double f = (input.regime == Regime::NonInteracting) ? 1.0 : 1.0 / std::sqrt(2.0);
        const double limit = f * v1;  // f v1/omega_x in natural units
        g.margin = limit / input.r0;
        g.pass = input.r0 < limit;
        std::ostringstream detail;
        detail << "R0 = " << input.r0 << " a_x vs f*v1/omega_x = " << limit
               << " a_x (f = " << f << ")";
        g.detail = detail.str();
        guards.push_back(g);
    }
    {
        GuardResult g;
        g.name = "negative-momentum-negligible";
        const double k1_ax = input.d;  // k1 a_x = d/a_x
        g.margin = k1_ax / momentum_ratio_threshold;
        g.pass = g.margin >= 1.0;
        std::ostringstream detail;
        detail << "k1*a_x = d/a_x = " << k1_ax << " vs threshold "
               << momentum_ratio_threshold;
        g.detail = detail.str();
        guards.push_back(g);
    }
    return guards;
}

GuardResult hierarchy_check(const DesignInput& input, double sigma_r, double margin) {
    if (!(sigma_r > 0.0)) throw std::invalid_argument("hierarchy_check: sigma_r must be positive");
    if (!(input.alpha > 0.0)) throw std::invalid_argument("hierarchy_check: alpha must be positive");
    const double r1 = input.d;  // d/a_x
    const double upper = (2.0 * constants::pi / input.alpha) / sigma_r;  // (2pi/alpha)(a_x/sigma_r)
    const double r2 = upper / r1;
    GuardResult g;
    g.name = "hierarchy 1 << d/a_x << (2pi/alpha)(a_x/sigma_r)";
    g.margin = std::min(r1 / margin, r2 / margin);
    g.pass = r1 >= margin && r2 >= margin;
    std::ostringstream detail;
    detail << "d/a_x = " << r1 << ", (2pi/alpha)(a_x/sigma_r) = " << upper
           << ", headroom ratio = " << r2;
    g.detail = detail.str();
    return g;
}

DesignReport design_report(const DesignInput& input, double t, double sigma_r,
                           double momentum_ratio_threshold, double hierarchy_margin) {
    DesignReport report;
    report.alpha = input.alpha;
    report.a2_opt = optimal_a2(input.alpha);
    report.f_min = backflow_function(input.alpha, report.a2_opt);
    report.population_transfer = report.a2_opt * report.a2_opt;
    report.guards = classical_guards(input, t, momentum_ratio_threshold);
    if (sigma_r > 0.0) {
        report.guards.push_back(hierarchy_check(input, sigma_r, hierarchy_margin));
    }
    return report;
}

}  // namespace backflow
