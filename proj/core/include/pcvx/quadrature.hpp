#pragma once

#include <pcvx/domain.hpp>

#include <string>
#include <vector>

namespace pcvx {

/// One volume-integration node in C^n with a positive weight.
struct QuadratureNode {
    CVec z;
    double weight = 0.0;
};

/// Volume quadrature over a bounded domain.  For the catalog geometries the
/// rule is built in polar/spherical coordinates and integrates every monomial
/// z^alpha zbar^beta with |alpha|, |beta| <= exactness exactly (up to
/// roundoff).  For other defining functions the rule is a tensor
/// Gauss-Legendre grid over the coordinate box with membership-masked
/// weights, which carries an O(1/nodes-per-axis) boundary error and is
/// flagged `exact = false`.
struct QuadratureRule {
    std::vector<QuadratureNode> nodes;
    std::string plan;    ///< human-readable construction description
    int exactness = 0;   ///< monomial degree the rule targets
    bool exact = true;   ///< false for membership-masked rules

    double volume() const;
};

/// Gauss-Legendre nodes and weights on (a, b), computed from the symmetric
/// Jacobi matrix of the Legendre recurrence.
void gauss_legendre(int count, double a, double b, RVec& nodes, RVec& weights);

/// Build a volume rule for the domain targeting exactness degree `degree`
/// (per multi-index; see QuadratureRule).  Catalog names "ball" (n <= 3),
/// "ellipsoid" (n <= 3), and "polydisc" get exact rules; everything else
/// falls back to the masked tensor grid, which is limited to n <= 2 by node
/// count.  Throws ArgumentError when the requested rule would exceed the
/// node budget (2^21 nodes).
QuadratureRule domain_quadrature(const DomainModel& domain, int degree);

/// Masked tensor Gauss-Legendre rule over the coordinate box of `domain`,
/// keeping the nodes with rho < 0.  `per_axis` nodes on each of the 2n real
/// axes.  This is the generic fallback used for non-catalog shapes such as
/// halfspace cuts.
QuadratureRule masked_box_quadrature(const DomainModel& domain, int per_axis);

}  // namespace pcvx
