#pragma once

#include <pcvx/domain.hpp>
#include <pcvx/quadrature.hpp>

#include <nlohmann/json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace pcvx {

/// Evaluation paths for the Bergman kernel and metric.
///   Oracle: the domain's closed form (errors when the domain has none).
///   Series: monomial series with per-shell adaptive truncation; valid on the
///           complete Reinhardt catalog domains.
///   Gram:   orthonormalization of the monomial basis up to a total degree
///           against a volume quadrature rule; works on any bounded domain
///           with polynomial-style defining data, subject to a near-boundary
///           resolution floor.
enum class KernelMethod { Oracle, Series, Gram };

KernelMethod kernel_method_from_string(const std::string& s);
std::string to_string(KernelMethod m);

struct BergmanOptions {
    KernelMethod method = KernelMethod::Oracle;
    int degree = 12;          ///< Gram basis total degree
    int degree_cap = 2000;    ///< series shell cap
    double tail_tol = 1e-8;   ///< series relative tail target per evaluation
};

/// One kernel evaluation with its numerical provenance.
struct KernelSample {
    double value = 0.0;
    double tail = 0.0;        ///< series truncation estimate (0 elsewhere)
    int degree = 0;           ///< highest monomial degree used
    double condition = 1.0;   ///< Gram condition number (1 elsewhere)
    std::string method;
};

/// Bergman kernel (on the diagonal) and Bergman metric evaluator.
///
/// The metric is always computed from the analytic complex log-Hessian of K
/// (never by differencing kernel values): the series and Gram paths
/// differentiate the orthonormal system termwise; the oracle path polarizes
/// the domain's closed-form metric.
///
/// Gram evaluators on product geometries (polydisc, disc x ball) factor into
/// per-factor Gram blocks, so the node count stays at the planar/two-variable
/// scale.  Gram matrices are regularized by 1e-14 * trace * I; a condition
/// number above 1e12 is refused with a NumericalError suggesting a lower
/// degree.  Gram results carry a resolution floor: values are certified only
/// at points whose boundary distance is at least min_trust_distance().
class KernelEvaluator {
public:
    explicit KernelEvaluator(const DomainModel& domain, BergmanOptions options = {});

    KernelSample kernel_sample(const CVec& z) const;
    double kernel(const CVec& z) const;

    /// B(j,k) = d^2 log K / dz_j dzbar_k at z (Hermitian).
    CMat log_hessian(const CVec& z) const;

    /// Bergman metric F(z; X) = sqrt(sum_jk B(j,k) X_j conj(X_k)).
    double metric(const CVec& z, const CVec& X) const;

    const BergmanOptions& options() const { return opt_; }
    const std::string& plan() const { return plan_; }
    double condition() const { return condition_; }
    /// Gram resolution floor delta_min(N) = 1/degree; 0 for oracle/series.
    double min_trust_distance() const { return trust_floor_; }
    nlohmann::json descriptor() const;

private:
    struct GramBlock {
        std::vector<int> coords;               ///< ambient coordinate positions
        std::vector<std::vector<int>> alphas;  ///< basis multi-indices
        CMat chol;                             ///< lower Cholesky factor of the Gram matrix
        double condition = 1.0;
        std::string plan;
    };

    KernelSample series_sample(const CVec& z, CVec* S1, CMat* S2) const;
    double gram_block_kernel(const GramBlock& block, const CVec& z, CVec* grad_accum,
                             CMat* hess_accum) const;

    DomainModel domain_;
    BergmanOptions opt_;
    std::string plan_;
    double condition_ = 1.0;
    double trust_floor_ = 0.0;
    std::vector<GramBlock> blocks_;                  // gram only
    std::function<double(const std::vector<int>&)> log_norm_;  // series only
};

/// Halfspace window U = { z : Re <z, direction>_H > offset } used for kernel
/// localization experiments; <.,.>_H is the Hermitian pairing.
struct HalfspaceWindow {
    CVec direction;
    double offset = 0.0;
};

struct LocalizationReport {
    std::vector<double> deltas;   ///< probes kept (within the resolution floor)
    std::vector<double> ratios;   ///< K_{Omega ∩ U} / K_Omega at each probe
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int truncated = 0;            ///< probes dropped below the floor
    std::string note;
};

/// Compare the kernel of the domain against the kernel of its intersection
/// with a halfspace window, along inward-normal probes p - delta * nu.  Both
/// sides use the Gram path at the same degree; probes below the Gram
/// resolution floor are dropped (reported in `truncated`).  When the window
/// contains the whole domain the two evaluators coincide and every ratio is
/// exactly 1.
LocalizationReport kernel_localization_ratio(const DomainModel& domain,
                                             const HalfspaceWindow& window,
                                             const CVec& p,
                                             const std::vector<double>& deltas,
                                             int degree = 24);

}  // namespace pcvx
