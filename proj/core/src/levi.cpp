#include <pcvx/levi.hpp>

#include <pcvx/distance.hpp>

#include <Eigen/Eigenvalues>

#include <sstream>

namespace pcvx {

Complex levi_form(const DomainModel& domain, const CVec& z, const CVec& X, const CVec& Y) {
    domain.check_dimension(z, "levi_form");
    domain.check_dimension(X, "levi_form direction X");
    domain.check_dimension(Y, "levi_form direction Y");
    const DerivativeBundle d = domain.derivatives(z);
    return (X.transpose() * d.hermitian * Y.conjugate())(0, 0);
}

namespace {

/// Orthonormal basis of the Hermitian complement of a unit vector u in C^n,
/// via Householder QR of [u | I].
CMat hermitian_complement(const CVec& u) {
    const int n = static_cast<int>(u.size());
    CMat M(n, n);
    M.col(0) = u;
    M.rightCols(n - 1) = CMat::Identity(n, n).leftCols(n - 1);
    Eigen::ColPivHouseholderQR<CMat> qr(M);
    CMat Q = qr.householderQ();
    // First column equals u up to phase; remaining columns span its complement.
    Complex phase = hermitian_dot(Q.col(0), u);
    if (std::abs(std::abs(phase) - 1.0) > 1e-8) {
        // Column pivoting may reorder; recover the complement by projection.
        CMat P = CMat::Identity(n, n) - u * u.adjoint();
        Eigen::ColPivHouseholderQR<CMat> qr2(P);
        CMat Q2 = qr2.householderQ();
        CMat out(n, n - 1);
        int c = 0;
        for (int j = 0; j < n && c < n - 1; ++j) {
            CVec v = Q2.col(j) - u * hermitian_dot(Q2.col(j), u);
            if (v.norm() > 0.5) out.col(c++) = v / v.norm();
        }
        return out;
    }
    return Q.rightCols(n - 1);
}

}  // namespace

LeviData levi_rank(const DomainModel& domain, const CVec& p, double tol_rel) {
    domain.check_dimension(p, "levi_rank");
    const int n = domain.dimension();

    CVec q = p;
    if (std::abs(domain.rho(q)) > 1e-10) {
        ProjectionResult proj = project_to_boundary(domain, p);
        if (!proj.converged)
            throw ArgumentError("levi_rank: could not project the point onto the boundary");
        q = proj.foot;
    }
    if (std::abs(domain.rho(q)) > 1e-10)
        throw ArgumentError("levi_rank: point is not on the boundary after projection");

    const DerivativeBundle d = domain.derivatives(q);
    const double gnorm = d.grad.norm();
    if (gnorm < 1e-10)
        throw ArgumentError("levi_rank: defining-function gradient vanishes at the base point");

    LeviData out;
    out.base_point = q;
    out.gradient = d.grad;

    if (n == 1) {
        out.tangential_basis = CMat(1, 0);
        out.levi_matrix = CMat(0, 0);
        out.eigenvalues = RVec(0);
        out.rank = 0;
        out.null_basis = CMat(1, 0);
        out.positive_basis = CMat(1, 0);
        out.rank_tolerance = tol_rel;
        return out;
    }

    // T^{1,0}(bOmega) = {X : <grad, X> = 0} is the Hermitian complement of
    // conj(grad).
    const CVec u = d.grad.conjugate() / gnorm;
    out.tangential_basis = hermitian_complement(u);

    CMat L(n - 1, n - 1);
    for (int a = 0; a < n - 1; ++a)
        for (int b = 0; b < n - 1; ++b)
            L(a, b) = (out.tangential_basis.col(a).transpose() * d.hermitian *
                       out.tangential_basis.col(b).conjugate())(0, 0);
    L = 0.5 * (L + L.adjoint()).eval();
    out.levi_matrix = L;

    Eigen::SelfAdjointEigenSolver<CMat> es(L);
    if (es.info() != Eigen::Success)
        throw NumericalError("levi_rank: eigensolver failed on the Levi matrix");

    const RVec ev_asc = es.eigenvalues();
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    const double tol = tol_rel * scale;
    out.rank_tolerance = tol;

    if (ev_asc.size() > 0 && ev_asc[0] < -tol) {
        std::ostringstream os;
        os << "levi_rank: Levi matrix is indefinite (min eigenvalue " << ev_asc[0]
           << ", tolerance " << tol << "); the boundary is not pseudoconvex here";
        throw StructureError(os.str());
    }

    out.eigenvalues = ev_asc.reverse();
    int rank = 0;
    for (int i = 0; i < out.eigenvalues.size(); ++i)
        if (out.eigenvalues[i] > tol) ++rank;
    out.rank = rank;

    const int l = n - 1 - rank;
    out.positive_basis = CMat(n, rank);
    out.null_basis = CMat(n, l);
    // Eigenvectors come back ascending: null directions first.  positive_basis
    // follows the descending eigenvalue order.
    for (int i = 0; i < l; ++i) out.null_basis.col(i) = out.tangential_basis * es.eigenvectors().col(i);
    for (int i = 0; i < rank; ++i)
        out.positive_basis.col(i) = out.tangential_basis * es.eigenvectors().col(n - 2 - i);
    return out;
}

}  // namespace pcvx
