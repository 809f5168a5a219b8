#pragma once

#include <pcvx/domain.hpp>
#include <pcvx/witness.hpp>

namespace pcvx {

/// Search parameters for the analytic-disc upper bound.
struct DiscFamily {
    int degree = 1;              ///< polynomial degree of the disc map
    int constraint_samples = 256;   ///< circle samples during the radius search
    int verify_samples = 4096;      ///< circle samples for the final certificate
    int optimizer_budget = 400;     ///< objective evaluations for shape search
    int max_shrinks = 60;           ///< 0.99-shrink retries during verification
    unsigned seed = 0xd15c;
};

/// A certified analytic disc through z with derivative s * X/|X| at the
/// origin.  The disc map is
///
///   f(t) = z + sum_{k=1}^{degree} coefficients.col(k-1) t^k,   |t| < 1,
///
/// with coefficients.col(0) = speed * X/|X|, and f(closure of D) was checked
/// to stay inside the domain on a dense boundary sample with margin.  The
/// distance-decreasing property of the Kobayashi metric then gives
/// F_K(z, X) <= |X| / speed = upper.
struct DiscBound {
    double upper = 0.0;    ///< certified upper bound for F_K(z, X)
    double speed = 0.0;    ///< |f'(0)| attained in the direction X/|X|
    CMat coefficients;     ///< n x degree Taylor coefficients of f - z
    int shrinks = 0;       ///< verification shrinks applied (0 = first try passed)
};

/// Upper bound for the Kobayashi metric F_K(z, X) from a polynomial analytic
/// disc.  The linear coefficient direction is fixed to X/|X|; its length s is
/// maximized by bisection (containment of the rescaled disc is monotone in
/// s), and for degree >= 2 the higher coefficients are optimized by
/// Nelder-Mead, seeded at zero so the bound is monotone in the degree.
/// Containment is tested on circle samples of rho o f, which bounds the whole
/// disc whenever rho is plurisubharmonic (true for the catalog domains); the
/// final coefficients are re-verified on a denser circle and shrunk until the
/// margin holds.  Throws ArgumentError for X = 0 or z outside the domain,
/// CertificationError when verification keeps failing.
DiscBound kobayashi_upper_disc(const DomainModel& domain, const CVec& z, const CVec& X,
                               const DiscFamily& family = {});

/// Convenience wrapper returning just the bound.
double kobayashi_upper(const DomainModel& domain, const CVec& z, const CVec& X,
                       int degree = 1);

/// Lower bound for the Kobayashi metric at the witness center:
/// sqrt(L_u(z; X)) for the log-psh witness u (u(z) = 0, 0 <= u < 1), which
/// minorizes the infinitesimal Sibony metric and hence F_K.  The witness must
/// be centered at z.
double sibony_lower(const DomainModel& domain, const CVec& z, const CVec& X,
                    const PshWitness& witness);

/// Same bound with the default domain witness built at z.
double sibony_lower(const DomainModel& domain, const CVec& z, const CVec& X);

/// Boundary-distance comparability form
///
///   M(z, X) = |L_d(z; X)| / d(z) + |<d_z d(z), X>|^2 / d(z)^2,
///
/// d the Euclidean distance to the boundary.  Closed-form derivatives are
/// used for the ball, the polydisc, and the disc x ball product (away from
/// the singular set of d); other domains fall back to finite differences of
/// the distance itself.  sqrt(M) is comparable to the Bergman and Kobayashi
/// metrics near the boundary, with constants depending only on the domain.
double comparability_M(const DomainModel& domain, const CVec& z, const CVec& X);

}  // namespace pcvx
