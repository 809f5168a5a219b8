#pragma once

#include <pcvx/bergman.hpp>
#include <pcvx/domain.hpp>
#include <pcvx/fitting.hpp>
#include <pcvx/levi.hpp>

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace pcvx {

/// Shared configuration of the boundary-approach experiments.  Probes run
/// along the inward normal at distances on a geometric grid.
struct SweepConfig {
    double delta_min = 1e-3;
    double delta_max = 1e-1;
    int count = 12;               ///< geometric probe count
    BergmanOptions bergman;       ///< kernel/metric evaluation path
    int disc_degree = 1;          ///< Kobayashi disc-family degree
    unsigned seed = 0xa11a;
};

/// Kernel growth exponent along the inward normal ray at a boundary point.
/// The expected slope is -(2 + rank): one order per complex-normal power,
/// one per strictly pseudoconvex tangential direction, none from the
/// Levi-null block.
struct KernelExponentReport {
    CVec probe_point;    ///< boundary base point (projection of the input)
    ExponentFit fit;     ///< deltas carry true boundary distances
    int rank = 0;        ///< Levi rank at the base point
    int dropped = 0;     ///< probes below the evaluator's resolution floor
    std::string method;
};

/// Fits the kernel exponent after certifying that the Levi rank is constant
/// on 20 sampled boundary points near p (rank drift -> StructureError).
/// Probes below the evaluator's trust floor are dropped; fewer than 4
/// usable probes -> NumericalError.
KernelExponentReport fit_kernel_exponent(const DomainModel& domain, const CVec& p,
                                         const SweepConfig& config);

/// A direction for the metric sweep, with the slope (F)^2 is expected to
/// show: -2 complex-normal, -1 strictly pseudoconvex tangential, 0 null
/// tangential.
struct MetricDirection {
    std::string label;
    CVec direction;           ///< unit vector
    double predicted = 0.0;   ///< expected log-log slope of (F)^2
};

/// The catalog directions at a boundary point: the complex normal, the
/// leading strictly pseudoconvex tangential direction (when the rank is
/// positive), and the leading Levi-null direction (when the nullity is
/// positive).
std::vector<MetricDirection> standard_directions(const DomainModel& domain, const CVec& p);

struct MetricDirectionReport {
    std::string label;
    CVec direction;
    ExponentFit bergman_fit;               ///< values = (F^B)^2 at the probes
    std::vector<double> kobayashi_lower;   ///< Sibony-witness lower bounds
    std::vector<double> kobayashi_upper;   ///< analytic-disc upper bounds
    ExponentFit kobayashi_fit;             ///< fit of lower*upper (only when conclusive)
    bool kobayashi_conclusive = false;     ///< all band ratios upper/lower <= 10
    double max_band_ratio = 0.0;
};

struct MetricExponentReport {
    CVec probe_point;
    int rank = 0;
    int null_dim = 0;
    int dropped = 0;
    std::vector<MetricDirectionReport> directions;
    std::string method;
};

/// Sweeps the squared metric along the inward normal in each direction.
/// The Bergman values come from the analytic log-Hessian of the kernel; the
/// Kobayashi values are two-sided [sibony_lower, disc upper] bands, fitted
/// only when every band is narrower than a factor 10 (otherwise the fit is
/// marked inconclusive rather than reported).
MetricExponentReport fit_metric_exponents(const DomainModel& domain, const CVec& p,
                                          const std::vector<MetricDirection>& directions,
                                          const SweepConfig& config);

/// Kernel growth against the anisotropic box prediction prod beta_j^{-2},
/// beta = (delta, sqrt(delta)...sqrt(delta), 1...1), checked together with
/// the barrier certification that underwrites it.
struct CatlinReport {
    CVec probe_point;
    int rank = 0;
    std::vector<double> deltas;      ///< deltas with a certified barrier
    std::vector<double> kernel_values;
    std::vector<double> predicted;   ///< prod beta_j^{-2} = delta^{-(2+rank)}
    std::vector<double> ratios;      ///< kernel / predicted
    std::vector<double> barrier_c0;  ///< certified Hessian floor constants
    double band = 0.0;               ///< max ratio / min ratio
    int barrier_failures = 0;        ///< deltas skipped (certification failed)
    int dropped = 0;                 ///< deltas below the evaluator floor
    std::string note;
    std::string method;
};

/// Builds the boundary chart once, then at each delta certifies the barrier
/// (reusing the previous delta's constants as a hint) and compares the
/// kernel at the inward-normal probe with the box prediction.  Failed
/// barrier certifications leave a gap in the report instead of aborting it.
CatlinReport catlin_consistency(const DomainModel& domain, const CVec& p,
                                const SweepConfig& config);

enum class FlatnessVerdict { Flat, PositiveRank, Inconclusive };

std::string to_string(FlatnessVerdict v);

struct FlatnessReport {
    FlatnessVerdict verdict = FlatnessVerdict::Inconclusive;
    int estimated_rank = -1;   ///< round(-slope) - 2; 0 means flat
    int direct_rank = -1;      ///< eigenvalue count from the Levi form
    double slope = 0.0;
    double residual = 0.0;
    std::string note;
};

/// Decides Levi flatness of the boundary near p from the kernel growth
/// exponent: slope within 0.1 of -2 -> flat; slope <= -2.5 -> positive rank
/// round(-slope) - 2.  The estimate is cross-checked against the direct
/// Levi eigenvalue count; any mismatch, an unstable fit (residual > 0.12),
/// or a sweep that is too short degrades the verdict to inconclusive.
FlatnessReport detect_levi_flatness(const DomainModel& domain, const CVec& p,
                                    const SweepConfig& config);

/// Two-sided comparability of the squared Bergman metric with the
/// boundary-distance form M(z, X): ratios (F^B)^2 / (M + C3) over unit
/// directions (normal, tangential representatives, random) across the
/// sweep, with C3 fitted to minimize the band.
struct ComparabilityReport {
    CVec probe_point;
    double C2 = 0.0;    ///< geometric mean ratio at the fitted C3
    double C3 = 0.0;    ///< fitted additive constant
    double band = 0.0;  ///< max ratio / min ratio at the fitted C3
    std::vector<double> deltas;   ///< probe distance per sample
    std::vector<double> ratios;   ///< (F^B)^2 / (M + C3) per sample
    std::vector<std::string> labels;
    int dropped = 0;
    std::string method;
};

ComparabilityReport comparability_band(const DomainModel& domain, const CVec& p,
                                       const SweepConfig& config);

nlohmann::json exponent_fit_to_json(const ExponentFit& fit);
nlohmann::json report_to_json(const KernelExponentReport& report);
nlohmann::json report_to_json(const MetricExponentReport& report);
nlohmann::json report_to_json(const CatlinReport& report);
nlohmann::json report_to_json(const FlatnessReport& report);
nlohmann::json report_to_json(const ComparabilityReport& report);

}  // namespace pcvx
