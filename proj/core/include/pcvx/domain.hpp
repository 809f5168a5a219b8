#pragma once

#include <pcvx/types.hpp>

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace pcvx {

/// One term of a polynomial defining function: coeff * z^alpha * zbar^beta.
/// A valid table is Hermitian-symmetric (the (beta, alpha) term carries the
/// same real coefficient), which makes the sum real-valued.
struct MonomialTerm {
    std::vector<int> alpha;
    std::vector<int> beta;
    double coeff = 0.0;
};

/// A bounded domain {rho < 0} in C^n described by a smooth defining function
/// with first and second Wirtinger derivative oracles, plus optional closed
/// forms (distance, Bergman kernel and metric) and Levi-foliation leaf data
/// used by chart normalization on Levi-degenerate boundaries.
///
/// Instances are immutable; copying shares the underlying oracles.
class DomainModel {
public:
    using RhoFn = std::function<double(const CVec&)>;
    using DerivFn = std::function<DerivativeBundle(const CVec&)>;
    using ScalarOracleFn = std::function<double(const CVec&)>;
    using MetricOracleFn = std::function<double(const CVec&, const CVec&)>;
    using LeafBasisFn = std::function<CMat(const CVec&)>;

    struct Init {
        std::string name = "custom";
        int dimension = 0;
        std::vector<double> params;
        RhoFn rho;
        DerivFn derivatives;             // required
        ScalarOracleFn kernel_oracle;    // optional (empty allowed)
        ScalarOracleFn distance_oracle;  // optional
        MetricOracleFn metric_oracle;    // optional, Bergman metric F(z, X)
        LeafBasisFn leaf_basis;          // optional, n x l basis at boundary p
        RVec coord_radius;               // |z_j| <= coord_radius[j] on closure
        CVec interior_anchor;            // a point with rho < 0
        nlohmann::json spec;             // serializable description
    };

    explicit DomainModel(Init init);

    int dimension() const { return dim_; }
    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }

    double rho(const CVec& z) const;
    DerivativeBundle derivatives(const CVec& z) const;
    bool contains(const CVec& z) const { return rho(z) < 0.0; }

    bool has_kernel_oracle() const { return static_cast<bool>(kernel_oracle_); }
    double kernel_oracle(const CVec& z) const;

    bool has_distance_oracle() const { return static_cast<bool>(distance_oracle_); }
    double distance_oracle(const CVec& z) const;

    bool has_metric_oracle() const { return static_cast<bool>(metric_oracle_); }
    double metric_oracle(const CVec& z, const CVec& X) const;

    bool has_leaf_basis() const { return static_cast<bool>(leaf_basis_); }
    /// Basis of the leaf tangent space of the Levi foliation through the
    /// boundary point p (n x l, orthonormal columns).  l may be 0.
    CMat leaf_basis(const CVec& p) const;

    /// Per-coordinate modulus bound: the closure satisfies |z_j| <= coord_radius()[j].
    const RVec& coord_radius() const { return coord_radius_; }
    /// Radius of a ball around the origin containing the closure.
    double circumradius() const;
    const CVec& interior_anchor() const { return anchor_; }

    const nlohmann::json& spec() const { return spec_; }

    void check_dimension(const CVec& z, const char* where) const;

private:
    std::string name_;
    int dim_;
    std::vector<double> params_;
    RhoFn rho_;
    DerivFn derivatives_;
    ScalarOracleFn kernel_oracle_;
    ScalarOracleFn distance_oracle_;
    MetricOracleFn metric_oracle_;
    LeafBasisFn leaf_basis_;
    RVec coord_radius_;
    CVec anchor_;
    nlohmann::json spec_;
};

/// Catalog constructor.  Supported names:
///   "ball"              unit ball in C^n, params ignored
///   "polydisc"          unit polydisc in C^n, params ignored
///   "product_disc_ball" D x B^2 in C^3, params ignored
///   "ellipsoid"         { sum a_j |z_j|^2 < 1 }, params = (a_1..a_n), a_j > 0
/// Throws ArgumentError on unknown names or invalid params.
DomainModel catalog_domain(const std::string& name, int dimension,
                           const std::vector<double>& params = {});

/// Domain from a Hermitian-symmetric polynomial coefficient table,
/// rho(z) = sum coeff * z^alpha * zbar^beta, with analytic derivatives.
/// coord_radius bounds the closure per coordinate (required: polynomial
/// sublevel sets need not be bounded on their own).
DomainModel polynomial_domain(int dimension, std::vector<MonomialTerm> terms,
                              RVec coord_radius, CVec interior_anchor);

/// Domain from a plain defining-function callback; derivative oracles are
/// central finite differences (step 1e-5, one Richardson step).  Meant for
/// quick experiments and cross-checks, not certified work.
DomainModel domain_from_function(int dimension, DomainModel::RhoFn rho,
                                 RVec coord_radius, CVec interior_anchor);

/// Image of `base` under the invertible affine map T(z) = A z + b, with all
/// oracles transported by the change of variables (the kernel picks up
/// |det A|^{-2}; distance survives only when A is unitary).
DomainModel transformed_domain(const DomainModel& base, const CMat& A, const CVec& b);

/// JSON round-trip of the domain description.  Catalog domains serialize as
/// {"name", "dimension", "params"}; polynomial domains as {"name": "custom",
/// "dimension", "defining_fn": {"terms": [...]}, "coord_radius", "anchor"}.
nlohmann::json domain_to_json(const DomainModel& domain);
DomainModel domain_from_json(const nlohmann::json& j);

/// Finite-difference Wirtinger derivative bundle of a scalar callback
/// (central differences + one Richardson extrapolation).  Exposed because
/// tests use it to cross-check analytic oracles.
DerivativeBundle finite_difference_bundle(const DomainModel::RhoFn& f, const CVec& z,
                                          double step = 1e-5);

}  // namespace pcvx
