#pragma once

#include <pcvx/domain.hpp>

namespace pcvx {

/// Levi analysis of the boundary at a point: the tangential complex Hessian
/// restricted to T^{1,0}(bOmega), its spectrum, and the split into strictly
/// pseudoconvex and null directions.
struct LeviData {
    CVec base_point;        ///< boundary point (after projection)
    CVec gradient;          ///< d rho / d z_j at the base point
    CMat tangential_basis;  ///< n x (n-1), orthonormal, annihilated by the gradient pairing
    CMat levi_matrix;       ///< (n-1) x (n-1) Hermitian form in the tangential basis
    RVec eigenvalues;       ///< descending
    int rank = 0;           ///< eigenvalues above tolerance
    CMat null_basis;        ///< n x l ambient basis of the Levi nullspace
    CMat positive_basis;    ///< n x (n-1-l) ambient basis of the positive directions
    double rank_tolerance = 0.0;  ///< absolute threshold used for the count
};

/// Levi form L_rho(z; X, Y) = sum_jk (d^2 rho / dz_j dzbar_k) X_j conj(Y_k).
/// z need not be a boundary point.
Complex levi_form(const DomainModel& domain, const CVec& z, const CVec& X, const CVec& Y);

/// Full Levi analysis at (the boundary projection of) p.  `tol_rel` scales
/// with the Levi matrix max-norm (floored at 1) to give the absolute
/// eigenvalue threshold.  Throws StructureError when the Levi matrix is
/// indefinite beyond tolerance (the domain is not pseudoconvex there) and
/// ArgumentError when p cannot be projected to a boundary point with a
/// nonvanishing gradient.
LeviData levi_rank(const DomainModel& domain, const CVec& p, double tol_rel = 1e-8);

}  // namespace pcvx
