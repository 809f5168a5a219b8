#pragma once

namespace pcvx::cutoffs {

/// Septic smoothstep: 0 on u<=0, 1 on u>=1, with three vanishing derivatives
/// at both ends.  All cutoff profiles below are built from it, which keeps
/// every profile C^3 — the regularity the barrier composition needs.
double smoothstep(double u);
double smoothstep_d1(double u);
double smoothstep_d2(double u);
double smoothstep_d3(double u);
/// int_0^u smoothstep, clamped outside [0,1] (linear continuation above).
double smoothstep_integral(double u);

/// Decreasing plateau cutoff: 1 on t<=1/2, septic descent, 0 on t>=1.
double chi1(double t);
double chi1_d1(double t);
double chi1_d2(double t);

/// Convex growth profile: 0 on t<=1/2, (t-1/2)^4 beyond.  chi2'>=0 and
/// chi2''>=0 everywhere, with C^3 matching at the junction.
double chi2(double t);
double chi2_d1(double t);
double chi2_d2(double t);

/// Concave saturation profile used on top of squared-distance bumps:
/// identity on [0,1/2], derivative tapering 1 -> 0 across [1/2,3/2],
/// constant 1 beyond.  Increasing, concave, C^3.
double peak(double t);
double peak_d1(double t);
double peak_d2(double t);

/// Certified defect constant of the saturation profile: the largest alpha
/// such that, writing kappa(t) = (log peak)'(t) + t (log peak)''(t),
/// kappa >= -alpha on the taper interval (kappa == 0 outside it).  Computed
/// once on a dense grid with interval padding; deterministic.
double peak_alpha();

}  // namespace pcvx::cutoffs
