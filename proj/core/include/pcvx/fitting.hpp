#pragma once

#include <pcvx/types.hpp>

#include <vector>

namespace pcvx {

/// Ordinary least squares on (log x, log y).  Inputs must be positive.
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;  ///< max |log y - (intercept + slope log x)|
};

LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

/// A boundary-approach sweep with its fitted growth exponent.
struct ExponentFit {
    std::vector<double> deltas;  ///< strictly decreasing probe distances
    std::vector<double> values;  ///< positive quantities measured at the probes
    double slope = 0.0;          ///< fitted d log(value) / d log(delta)
    double predicted = 0.0;      ///< model exponent the sweep is compared against
    double residual = 0.0;       ///< max absolute log-log deviation from the fit
};

ExponentFit make_exponent_fit(std::vector<double> deltas, std::vector<double> values,
                              double predicted);

/// Geometric grid from hi down to lo (inclusive), n points, strictly
/// decreasing.
std::vector<double> geometric_deltas(double lo, double hi, int n);

}  // namespace pcvx
