#include <pcvx/fitting.hpp>

#include <cmath>

namespace pcvx {

LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ArgumentError("fit_log_log: need at least two matching samples");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ArgumentError("fit_log_log: samples must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-14 * (1.0 + sxx))
        throw NumericalError("fit_log_log: degenerate abscissae");
    LogLogFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (int i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * std::log(x[i]);
        fit.max_residual = std::max(fit.max_residual, std::abs(std::log(y[i]) - pred));
    }
    return fit;
}

ExponentFit make_exponent_fit(std::vector<double> deltas, std::vector<double> values,
                              double predicted) {
    LogLogFit f = fit_log_log(deltas, values);
    ExponentFit out;
    out.deltas = std::move(deltas);
    out.values = std::move(values);
    out.slope = f.slope;
    out.predicted = predicted;
    out.residual = f.max_residual;
    return out;
}

std::vector<double> geometric_deltas(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw ArgumentError("geometric_deltas: need 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double ratio = std::pow(lo / hi, 1.0 / (n - 1));
    double d = hi;
    for (int i = 0; i < n; ++i) {
        out[i] = d;
        d *= ratio;
    }
    out.back() = lo;
    return out;
}

}  // namespace pcvx
