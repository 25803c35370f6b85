#include "backflow/imaging.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace backflow {

double contrast_factor(double q, double sigma_r) {
    if (!(q > 0.0)) throw std::invalid_argument("contrast_factor: q must be positive");
    if (sigma_r < 0.0) throw std::invalid_argument("contrast_factor: sigma_r must be >= 0");
    return std::exp(-0.5 * q * q * sigma_r * sigma_r);
}

double observed_min_norm(const BraggConfig& bragg, double zeta, double envelope_ratio) {
    if (!(zeta >= 0.0 && zeta <= 1.0)) {
        std::ostringstream msg;
        msg << "observed_min_norm: zeta must lie in [0,1] (got " << zeta << ")";
        throw std::invalid_argument(msg.str());
    }
    const double sum_sq = bragg.a1 * bragg.a1 + bragg.a2 * bragg.a2;
    const double cross = 2.0 * zeta * bragg.a1 * bragg.a2;
    return envelope_ratio * (sum_sq - cross) / (sum_sq + cross);
}

double critical_norm(const BraggConfig& bragg, double alpha, double envelope_ratio) {
    if (!(alpha > 0.0)) throw std::invalid_argument("critical_norm: alpha must be positive");
    return envelope_ratio * alpha / (alpha + 2.0) * (bragg.a1 - bragg.a2) /
           (bragg.a1 + bragg.a2);
}

CriticalResolution critical_resolution(const BraggConfig& bragg, double alpha) {
    CriticalResolution out;
    const double r = critical_norm(bragg, alpha);
    const double a = bragg.a1 * bragg.a2;
    if (a == 0.0 || r <= 0.0) {
        // No fringes, or a non-positive threshold (A2 >= A1): the observed
        // minimum (>= (A1-A2)^2/(A1+A2)^2 >= 0) can never drop below it.
        out.status = DetectStatus::NeverDetectable;
        out.sigma_r = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    if (r >= 1.0) {
        out.status = DetectStatus::AlwaysDetectable;
        out.sigma_r = std::numeric_limits<double>::infinity();
        return out;
    }
    const double sum_sq = bragg.a1 * bragg.a1 + bragg.a2 * bragg.a2;
    const double zeta_star = (1.0 - r) * sum_sq / ((1.0 + r) * 2.0 * a);
    if (zeta_star >= 1.0) {
        out.status = DetectStatus::NeverDetectable;
        out.sigma_r = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.status = DetectStatus::Solved;
    out.zeta = zeta_star;
    out.sigma_r = std::sqrt(-2.0 * std::log(zeta_star)) / bragg.q;
    return out;
}

CriticalResolution critical_resolution_bisect(const BraggConfig& bragg, double alpha) {
    CriticalResolution out;
    const double r = critical_norm(bragg, alpha);
    auto gap = [&](double sigma) {
        return observed_min_norm(bragg, contrast_factor(bragg.q, sigma)) - r;
    };
    if (!(gap(0.0) < 0.0)) {
        out.status = DetectStatus::NeverDetectable;
        out.sigma_r = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    // Expand until undetectable; observed_min_norm -> 1 > r as sigma grows.
    double lo = 0.0;
    double hi = 1.0 / bragg.q;
    int expansions = 0;
    while (gap(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 200) {
            out.status = DetectStatus::AlwaysDetectable;
            out.sigma_r = std::numeric_limits<double>::infinity();
            return out;
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * hi) break;
    }
    out.status = DetectStatus::Solved;
    out.sigma_r = 0.5 * (lo + hi);
    out.zeta = contrast_factor(bragg.q, out.sigma_r);
    return out;
}

DetectabilityReport assess_detectability(const BraggConfig& bragg, double alpha,
                                         double sigma_r) {
    DetectabilityReport report;
    report.zeta = contrast_factor(bragg.q, sigma_r);
    report.observed_min_norm = observed_min_norm(bragg, report.zeta);
    report.critical_norm = critical_norm(bragg, alpha);
    report.detectable = report.observed_min_norm < report.critical_norm;
    const CriticalResolution cr = critical_resolution(bragg, alpha);
    report.status = cr.status;
    report.sigma_r_critical = cr.sigma_r;
    return report;
}

FieldProfile blur_profile(const FieldProfile& profile, double sigma_r) {
    if (sigma_r < 0.0) throw std::invalid_argument("blur_profile: sigma_r must be >= 0");
    FieldProfile out = profile;
    if (sigma_r == 0.0) return out;

    const double dx = profile.dx();
    if (!(dx > 0.0)) throw std::invalid_argument("blur_profile: profile grid is empty");
    if (!(dx < sigma_r / 4.0)) {
        std::ostringstream msg;
        msg << "blur_profile: grid spacing " << dx << " too coarse for sigma_r = "
            << sigma_r << " (need dx < sigma_r/4)";
        throw std::invalid_argument(msg.str());
    }

    // Kernel truncated at 7 sigma and renormalized: discrete weights sum to 1,
    // so the total atom number is conserved up to boundary leakage.
    const int half = static_cast<int>(std::ceil(7.0 * sigma_r / dx));
    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (int j = -half; j <= half; ++j) {
        const double u = j * dx / sigma_r;
        kernel[j + half] = std::exp(-0.5 * u * u);
        sum += kernel[j + half];
    }
    for (double& w : kernel) w /= sum;

    const int n = static_cast<int>(profile.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const int j_lo = std::max(-half, -i);
        const int j_hi = std::min(half, n - 1 - i);
        for (int j = j_lo; j <= j_hi; ++j) {
            acc += kernel[j + half] * profile.rho[i + j];
        }
        out.rho[i] = acc;
    }
    return out;
}

}  // namespace backflow
