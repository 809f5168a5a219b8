#pragma once

#include <pcvx/domain.hpp>
#include <pcvx/levi.hpp>

#include <nlohmann/json.hpp>

namespace pcvx {

/// Boundary chart centered at a boundary point p that brings the defining
/// function into the normal form
///
///   rho_chart(zeta) = Re zeta_0 + sum_{j=1}^{n-l-1} lambda_j |zeta_j|^2
///                     + O(|zeta'|^3 + |zeta'|^2 |zeta''| + |Im zeta_0| |zeta|),
///
/// where zeta' = (zeta_1..zeta_{n-l-1}) are the strictly pseudoconvex
/// tangential coordinates and zeta'' = (zeta_{n-l}..zeta_{n-1}) the Levi-null
/// block (tangent to the boundary foliation).  The map is
///
///   zeta = shear(U (z - p)),    shear: zeta_0 = xi_0 + xi'^T S xi',
///
/// with U unitary (outward normal -> positive Re zeta_0 axis, positive Levi
/// directions -> middle block in descending eigenvalue order, leaf tangents
/// -> trailing block) and S the symmetric tangential holomorphic Hessian
/// divided by 2|grad rho(p)|.  rho_chart is the pullback of rho divided by
/// zeta1_rescale = 2|grad rho(p)|, which normalizes the linear term to
/// exactly Re zeta_0; lambda then carries the tangential Levi eigenvalues
/// divided by the same factor.
struct NormalizedChart {
    CVec base_point;   ///< p in domain coordinates
    CMat rotation;     ///< U: xi = U (z - p)
    CMat shear;        ///< (n-l-1)^2 symmetric block S acting on xi'
    RVec lambda;       ///< descending, positive, size n-l-1
    int dim = 0;
    int rank = 0;      ///< Levi rank n-l-1
    int l = 0;         ///< dimension of the Levi-null block
    double grad_norm = 0.0;      ///< |grad rho(p)|
    double zeta1_rescale = 0.0;  ///< 2 |grad rho(p)|, the defining-function normalization
    double valid_radius = 0.0;   ///< certified radius of the normal-form residual bound
    double residual_constant = 0.0;  ///< constant C in the certified residual inequality
    double peak_radius = 0.0;    ///< certified radius of the peak-function wedge condition

    CVec to_chart(const CVec& z) const;
    CVec from_chart(const CVec& zeta) const;
    /// Holomorphic Jacobian d(from_chart)/d zeta.
    CMat jacobian_from_chart(const CVec& zeta) const;

    /// Normalized defining function of the chart image and its derivatives.
    double rho(const CVec& zeta) const;
    DerivativeBundle rho_derivatives(const CVec& zeta) const;

    /// Solve Re zeta_0 on the boundary graph above (im0, zeta_1..zeta_{n-1});
    /// returns false when the 1-D Newton iteration fails inside the chart.
    bool solve_graph(double im0, const CVec& tail, double& re0) const;

    int sp_block_begin() const { return 1; }
    int sp_block_end() const { return 1 + rank; }      ///< one past the zeta' block
    int null_block_begin() const { return 1 + rank; }

    /// Synthetic model chart with rho = Re zeta_0 + sum lambda_j |zeta_j|^2
    /// exactly (no residual).  Used by barrier tests and as the flat model.
    static NormalizedChart model(int dim, int l, RVec lambda_positive,
                                 double valid_radius = 1.0);

private:
    friend NormalizedChart normalize_chart(const DomainModel&, const CVec&, unsigned);
    std::function<DerivativeBundle(const CVec&)> rho_fn_;
    std::function<double(const CVec&)> rho_value_fn_;
};

/// Build and certify the chart at (the boundary projection of) p.  Performs a
/// Levi-rank drift check on nearby boundary points, requires leaf data when
/// the rank is degenerate, certifies the residual bound on dyadic shells, and
/// certifies the wedge condition Re zeta_0 < |Im zeta_0| used by the peak
/// function.  Throws StructureError / CertificationError on failure.
NormalizedChart normalize_chart(const DomainModel& domain, const CVec& p,
                                unsigned seed = 0x5eed);

/// Local weak peak function h(zeta) = exp(-(-zeta_0)^{2/3}) (principal
/// branch), evaluated at a domain point z inside the certified peak radius:
/// h(p) = 1 and |h| < 1 on the rest of the chart patch.
Complex peak_function(const NormalizedChart& chart, const CVec& z);

nlohmann::json chart_to_json(const NormalizedChart& chart);

}  // namespace pcvx
