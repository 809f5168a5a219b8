#include <pcvx/cutoffs.hpp>

#include <algorithm>
#include <cmath>

namespace pcvx::cutoffs {

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return ((( -20.0 * u + 70.0) * u - 84.0) * u + 35.0) * u * u * u * u;
}

double smoothstep_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = 1.0 - u;
    return 140.0 * u * u * u * v * v * v;
}

double smoothstep_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = 1.0 - u;
    return 420.0 * u * u * v * v * (1.0 - 2.0 * u);
}

double smoothstep_d3(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 840.0 * u * (1.0 - u) * (1.0 - 5.0 * u + 5.0 * u * u);
}

double smoothstep_integral(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 0.5 + (u - 1.0);
    return (((( -2.5 * u + 10.0) * u - 14.0) * u + 7.0)) * u * u * u * u * u;
}

double chi1(double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - smoothstep(2.0 * t - 1.0);
}

double chi1_d1(double t) { return -2.0 * smoothstep_d1(2.0 * t - 1.0); }

double chi1_d2(double t) { return -4.0 * smoothstep_d2(2.0 * t - 1.0); }

double chi2(double t) {
    if (t <= 0.5) return 0.0;
    const double q = t - 0.5;
    return q * q * q * q;
}

double chi2_d1(double t) {
    if (t <= 0.5) return 0.0;
    const double q = t - 0.5;
    return 4.0 * q * q * q;
}

double chi2_d2(double t) {
    if (t <= 0.5) return 0.0;
    const double q = t - 0.5;
    return 12.0 * q * q;
}

double peak(double t) {
    if (t <= 0.5) return t;
    if (t >= 1.5) return 1.0;
    return t - smoothstep_integral(t - 0.5);
}

double peak_d1(double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 1.5) return 0.0;
    return 1.0 - smoothstep(t - 0.5);
}

double peak_d2(double t) {
    if (t <= 0.5 || t >= 1.5) return 0.0;
    return -smoothstep_d1(t - 0.5);
}

double peak_alpha() {
    static const double alpha = [] {
        constexpr int kGrid = 10001;
        double kappa_min = 0.0;
        for (int i = 0; i <= kGrid; ++i) {
            const double t = 0.5 + static_cast<double>(i) / kGrid;
            const double p = peak(t);
            const double p1 = peak_d1(t);
            const double p2 = peak_d2(t);
            const double log1 = p1 / p;
            const double log2 = p2 / p - log1 * log1;
            kappa_min = std::min(kappa_min, log1 + t * log2);
        }
        return 1.02 * std::max(0.0, -kappa_min) + 1e-9;
    }();
    return alpha;
}

}  // namespace pcvx::cutoffs
