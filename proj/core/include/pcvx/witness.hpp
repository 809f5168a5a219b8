#pragma once

#include <pcvx/domain.hpp>

namespace pcvx {

/// A log-plurisubharmonic witness centered at a point of a domain:
///   u(z) = peak_cutoff(g(z)) * exp(M (phi(z) - 1)),
///   g(z) = sum_j |z_j - center_j|^2 / beta_j^2,
/// where phi is plurisubharmonic with |phi| <= 1 and a certified Hessian
/// floor relative to the anisotropic form sum |X_j|^2/beta_j^2.  Then
/// u(center) = 0, 0 <= u < 1, and log u is plurisubharmonic once
/// M >= alpha / floor (alpha the cutoff's certified defect constant), so u
/// witnesses a lower bound for metrics defined over log-psh classes:
///   L_u(center; X) = exp(M (phi(center) - 1)) * sum |X_j|^2 / beta_j^2
/// exactly.
class PshWitness {
public:
    PshWitness(CVec center, RVec beta, DomainModel::DerivFn phi, double M,
               double alpha, double hessian_floor);

    double value(const CVec& z) const;
    DerivativeBundle derivatives(const CVec& z) const;

    /// Levi form of log u, computed in log space (stable where g > 0):
    /// L_{log chi(g)} + M L_phi.
    double log_levi(const CVec& z, const CVec& Y) const;

    /// Exact Levi form of u at the center.
    double center_levi(const CVec& X) const;
    /// log of the exponential factor at the center: M (phi(center) - 1).
    double center_log_factor() const;

    const CVec& center() const { return center_; }
    const RVec& beta() const { return beta_; }
    double M() const { return M_; }
    double alpha() const { return alpha_; }
    double hessian_floor() const { return floor_; }

    double g(const CVec& z) const;

private:
    CVec center_;
    RVec beta_;
    DomainModel::DerivFn phi_;
    double M_;
    double alpha_;
    double floor_;
};

/// Builds the witness after spot-checking the phi precondition (|phi| <= 1
/// and Levi floor) on sampled points of the polydisc {|z_j - center_j| <
/// beta_j}, and certifying log-plurisubharmonicity of the result by sampling.
/// M = ceil(1.25 * alpha / hessian_floor).  Throws ArgumentError /
/// CertificationError on failure.
PshWitness build_log_psh_witness(const CVec& center, const RVec& beta,
                                 const DomainModel::DerivFn& phi, double alpha,
                                 double hessian_floor, unsigned seed = 0x517b);

/// Convenience witness for a bounded domain: beta_j = shrink * dist / sqrt(n)
/// (the polydisc then sits inside the domain), phi the normalized squared
/// distance to an enclosing ball's center minus one.
PshWitness domain_witness(const DomainModel& domain, const CVec& center,
                          double shrink = 0.9, unsigned seed = 0x517b);

}  // namespace pcvx
