#include <pcvx/domain.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace pcvx {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int m) {
    double r = 1.0;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
}

/// Catalog defining functions all have the shape
///   rho(z) = max_g ( sum_{j in group g} w_j |z_j|^2 ) - 1,
/// smooth wherever the max is attained by a single group.  `groups` lists the
/// coordinate indices of each factor, `weights` the per-coordinate weights.
struct QuadraticGroups {
    std::vector<std::vector<int>> groups;
    RVec weights;

    int active_group(const CVec& z) const {
        int best = 0;
        double best_val = -1.0;
        for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
            double v = 0.0;
            for (int j : groups[g]) v += weights[j] * std::norm(z[j]);
            if (v > best_val) {
                best_val = v;
                best = g;
            }
        }
        return best;
    }

    double rho(const CVec& z) const {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& g : groups) {
            double v = 0.0;
            for (int j : g) v += weights[j] * std::norm(z[j]);
            best = std::max(best, v);
        }
        return best - 1.0;
    }

    DerivativeBundle derivatives(const CVec& z) const {
        const int n = static_cast<int>(z.size());
        DerivativeBundle b;
        b.value = rho(z);
        b.grad = CVec::Zero(n);
        b.hermitian = CMat::Zero(n, n);
        b.holomorphic = CMat::Zero(n, n);
        for (int j : groups[active_group(z)]) {
            b.grad[j] = weights[j] * std::conj(z[j]);
            b.hermitian(j, j) = weights[j];
        }
        return b;
    }

    CMat leaf_basis(const CVec& p) const {
        const int n = static_cast<int>(p.size());
        std::vector<int> inactive;
        const auto& act = groups[active_group(p)];
        for (int j = 0; j < n; ++j)
            if (std::find(act.begin(), act.end(), j) == act.end()) inactive.push_back(j);
        CMat basis = CMat::Zero(n, static_cast<int>(inactive.size()));
        for (int c = 0; c < static_cast<int>(inactive.size()); ++c)
            basis(inactive[c], c) = 1.0;
        return basis;
    }
};

double ball_kernel(int n, double one_minus_sq) {
    return factorial(n) / std::pow(kPi, n) * std::pow(one_minus_sq, -(n + 1));
}

/// Squared Bergman metric of the unit ball at z in direction X.
double ball_metric_sq(int n, const CVec& z, const CVec& X) {
    const double d = 1.0 - z.squaredNorm();
    const Complex s = hermitian_dot(X, z);
    return (n + 1) * (X.squaredNorm() / d + std::norm(s) / (d * d));
}

double disc_metric_sq(Complex z, Complex X) {
    const double d = 1.0 - std::norm(z);
    return 2.0 * std::norm(X) / (d * d);
}

std::vector<int> json_to_multiindex(const nlohmann::json& j, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ArgumentError("defining_fn multi-index has wrong length");
    std::vector<int> idx;
    for (const auto& v : j) {
        int k = v.get<int>();
        if (k < 0) throw ArgumentError("defining_fn multi-index entries must be >= 0");
        idx.push_back(k);
    }
    return idx;
}

}  // namespace

DomainModel::DomainModel(Init init)
    : name_(std::move(init.name)),
      dim_(init.dimension),
      params_(std::move(init.params)),
      rho_(std::move(init.rho)),
      derivatives_(std::move(init.derivatives)),
      kernel_oracle_(std::move(init.kernel_oracle)),
      distance_oracle_(std::move(init.distance_oracle)),
      metric_oracle_(std::move(init.metric_oracle)),
      leaf_basis_(std::move(init.leaf_basis)),
      coord_radius_(std::move(init.coord_radius)),
      anchor_(std::move(init.interior_anchor)),
      spec_(std::move(init.spec)) {
    if (dim_ < 1) throw ArgumentError("domain dimension must be >= 1");
    if (!rho_ || !derivatives_) throw ArgumentError("domain requires rho and derivative oracles");
    if (coord_radius_.size() != dim_) throw ArgumentError("coord_radius must have one entry per coordinate");
    if (anchor_.size() != dim_) throw ArgumentError("interior anchor has wrong dimension");
}

void DomainModel::check_dimension(const CVec& z, const char* where) const {
    if (static_cast<int>(z.size()) != dim_) {
        std::ostringstream os;
        os << where << ": expected dimension " << dim_ << ", got " << z.size();
        throw ArgumentError(os.str());
    }
}

double DomainModel::rho(const CVec& z) const {
    check_dimension(z, "rho");
    return rho_(z);
}

DerivativeBundle DomainModel::derivatives(const CVec& z) const {
    check_dimension(z, "derivatives");
    return derivatives_(z);
}

double DomainModel::kernel_oracle(const CVec& z) const {
    check_dimension(z, "kernel_oracle");
    if (!kernel_oracle_) throw ArgumentError("domain '" + name_ + "' has no kernel oracle");
    return kernel_oracle_(z);
}

double DomainModel::distance_oracle(const CVec& z) const {
    check_dimension(z, "distance_oracle");
    if (!distance_oracle_) throw ArgumentError("domain '" + name_ + "' has no distance oracle");
    return distance_oracle_(z);
}

double DomainModel::metric_oracle(const CVec& z, const CVec& X) const {
    check_dimension(z, "metric_oracle");
    check_dimension(X, "metric_oracle direction");
    if (!metric_oracle_) throw ArgumentError("domain '" + name_ + "' has no metric oracle");
    return metric_oracle_(z, X);
}

CMat DomainModel::leaf_basis(const CVec& p) const {
    check_dimension(p, "leaf_basis");
    if (!leaf_basis_) throw StructureError("domain '" + name_ + "' supplies no leaf charts");
    return leaf_basis_(p);
}

double DomainModel::circumradius() const { return coord_radius_.norm(); }

DerivativeBundle finite_difference_bundle(const DomainModel::RhoFn& f, const CVec& z, double step) {
    const int n = static_cast<int>(z.size());
    const int m = 2 * n;  // real coordinates (x_1, y_1, ..., x_n, y_n)

    auto eval = [&](const RVec& offset) {
        CVec w = z;
        for (int j = 0; j < n; ++j) w[j] += Complex(offset[2 * j], offset[2 * j + 1]);
        return f(w);
    };

    auto grad_at = [&](double h) {
        RVec g(m);
        for (int a = 0; a < m; ++a) {
            RVec e = RVec::Zero(m);
            e[a] = h;
            g[a] = (eval(e) - eval(-e)) / (2.0 * h);
        }
        return g;
    };
    auto hess_at = [&](double h) {
        RMat H(m, m);
        const double f0 = eval(RVec::Zero(m));
        for (int a = 0; a < m; ++a) {
            RVec ea = RVec::Zero(m);
            ea[a] = h;
            H(a, a) = (eval(ea) - 2.0 * f0 + eval(-ea)) / (h * h);
            for (int b = a + 1; b < m; ++b) {
                RVec eb = RVec::Zero(m);
                eb[b] = h;
                const double v = (eval(ea + eb) - eval(ea - eb) - eval(eb - ea) + eval(-ea - eb)) / (4.0 * h * h);
                H(a, b) = v;
                H(b, a) = v;
            }
        }
        return H;
    };

    // One Richardson step: central differences have O(h^2) error, so
    // (4 D(h/2) - D(h)) / 3 cancels the leading term.
    const RVec g = (4.0 * grad_at(step / 2) - grad_at(step)) / 3.0;
    const RMat H = (4.0 * hess_at(step / 2) - hess_at(step)) / 3.0;

    DerivativeBundle b;
    b.value = eval(RVec::Zero(m));
    b.grad = CVec(n);
    b.hermitian = CMat(n, n);
    b.holomorphic = CMat(n, n);
    for (int j = 0; j < n; ++j) b.grad[j] = 0.5 * Complex(g[2 * j], -g[2 * j + 1]);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const double xx = H(2 * j, 2 * k), yy = H(2 * j + 1, 2 * k + 1);
            const double xy = H(2 * j, 2 * k + 1), yx = H(2 * j + 1, 2 * k);
            b.hermitian(j, k) = 0.25 * Complex(xx + yy, xy - yx);
            b.holomorphic(j, k) = 0.25 * Complex(xx - yy, -(xy + yx));
        }
    }
    // Symmetrize to remove FD noise; the exact matrices have these symmetries.
    b.hermitian = 0.5 * (b.hermitian + b.hermitian.adjoint()).eval();
    b.holomorphic = 0.5 * (b.holomorphic + b.holomorphic.transpose()).eval();
    return b;
}

DomainModel catalog_domain(const std::string& name, int dimension, const std::vector<double>& params) {
    if (dimension < 1) throw ArgumentError("catalog_domain: dimension must be >= 1");

    QuadraticGroups q;
    DomainModel::Init init;
    init.name = name;
    init.dimension = dimension;
    init.params = params;
    init.spec = {{"name", name}, {"dimension", dimension}, {"params", params}};

    const int n = dimension;
    if (name == "ball") {
        q.groups = {std::vector<int>(n)};
        std::iota(q.groups[0].begin(), q.groups[0].end(), 0);
        q.weights = RVec::Ones(n);
        init.kernel_oracle = [n](const CVec& z) { return ball_kernel(n, 1.0 - z.squaredNorm()); };
        init.distance_oracle = [](const CVec& z) { return 1.0 - z.norm(); };
        init.metric_oracle = [n](const CVec& z, const CVec& X) { return std::sqrt(ball_metric_sq(n, z, X)); };
        init.coord_radius = RVec::Ones(n);
    } else if (name == "polydisc") {
        q.groups.resize(n);
        for (int j = 0; j < n; ++j) q.groups[j] = {j};
        q.weights = RVec::Ones(n);
        init.kernel_oracle = [n](const CVec& z) {
            double k = 1.0;
            for (int j = 0; j < n; ++j) {
                const double d = 1.0 - std::norm(z[j]);
                k *= 1.0 / (kPi * d * d);
            }
            return k;
        };
        init.distance_oracle = [n](const CVec& z) {
            double d = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) d = std::min(d, 1.0 - std::abs(z[j]));
            return d;
        };
        init.metric_oracle = [n](const CVec& z, const CVec& X) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += disc_metric_sq(z[j], X[j]);
            return std::sqrt(s);
        };
        init.coord_radius = RVec::Ones(n);
    } else if (name == "product_disc_ball") {
        if (dimension != 3)
            throw ArgumentError("catalog_domain: product_disc_ball lives in C^3");
        q.groups = {{0}, {1, 2}};
        q.weights = RVec::Ones(3);
        init.kernel_oracle = [](const CVec& z) {
            const double d1 = 1.0 - std::norm(z[0]);
            const double db = 1.0 - std::norm(z[1]) - std::norm(z[2]);
            return 1.0 / (kPi * d1 * d1) * ball_kernel(2, db);
        };
        init.distance_oracle = [](const CVec& z) {
            const double rb = std::sqrt(std::norm(z[1]) + std::norm(z[2]));
            return std::min(1.0 - std::abs(z[0]), 1.0 - rb);
        };
        init.metric_oracle = [](const CVec& z, const CVec& X) {
            CVec zb(2), Xb(2);
            zb << z[1], z[2];
            Xb << X[1], X[2];
            return std::sqrt(disc_metric_sq(z[0], X[0]) + ball_metric_sq(2, zb, Xb));
        };
        init.coord_radius = RVec::Ones(3);
    } else if (name == "ellipsoid") {
        if (static_cast<int>(params.size()) != n)
            throw ArgumentError("catalog_domain: ellipsoid needs one positive coefficient per coordinate");
        for (double a : params)
            if (!(a > 0.0)) throw ArgumentError("catalog_domain: ellipsoid coefficients must be positive");
        q.groups = {std::vector<int>(n)};
        std::iota(q.groups[0].begin(), q.groups[0].end(), 0);
        q.weights = Eigen::Map<const RVec>(params.data(), n);
        init.coord_radius = RVec(n);
        for (int j = 0; j < n; ++j) init.coord_radius[j] = 1.0 / std::sqrt(params[j]);
        // No closed-form kernel/distance/metric: the series and projection
        // paths cover the ellipsoid.
    } else {
        throw ArgumentError("catalog_domain: unknown name '" + name + "'");
    }

    init.rho = [q](const CVec& z) { return q.rho(z); };
    init.derivatives = [q](const CVec& z) { return q.derivatives(z); };
    init.leaf_basis = [q](const CVec& p) { return q.leaf_basis(p); };
    init.interior_anchor = CVec::Zero(n);
    return DomainModel(std::move(init));
}

namespace {

struct PolynomialTable {
    int dim;
    std::vector<MonomialTerm> terms;

    Complex monomial(const CVec& z, const std::vector<int>& alpha, const std::vector<int>& beta,
                     int dz = -1, int dzb = -1, int dz2 = -1) const {
        // Value of z^alpha zbar^beta with optional derivatives: one d/dz_{dz},
        // one d/dzbar_{dzb}, and a second d/dz_{dz2}.
        std::vector<int> a = alpha, b = beta;
        double c = 1.0;
        auto lower = [&c](std::vector<int>& idx, int j) {
            if (idx[j] == 0) {
                c = 0.0;
                return;
            }
            c *= idx[j];
            idx[j] -= 1;
        };
        if (dz >= 0) lower(a, dz);
        if (dz2 >= 0 && c != 0.0) lower(a, dz2);
        if (dzb >= 0 && c != 0.0) lower(b, dzb);
        if (c == 0.0) return Complex(0.0);
        Complex v(c, 0.0);
        for (int j = 0; j < dim; ++j) {
            for (int t = 0; t < a[j]; ++t) v *= z[j];
            for (int t = 0; t < b[j]; ++t) v *= std::conj(z[j]);
        }
        return v;
    }

    double rho(const CVec& z) const {
        Complex s(0.0);
        for (const auto& t : terms) s += t.coeff * monomial(z, t.alpha, t.beta);
        return s.real();
    }

    DerivativeBundle derivatives(const CVec& z) const {
        DerivativeBundle b;
        b.grad = CVec::Zero(dim);
        b.hermitian = CMat::Zero(dim, dim);
        b.holomorphic = CMat::Zero(dim, dim);
        Complex val(0.0);
        for (const auto& t : terms) {
            val += t.coeff * monomial(z, t.alpha, t.beta);
            for (int j = 0; j < dim; ++j) {
                b.grad[j] += t.coeff * monomial(z, t.alpha, t.beta, j);
                for (int k = 0; k < dim; ++k) {
                    b.hermitian(j, k) += t.coeff * monomial(z, t.alpha, t.beta, j, k);
                    b.holomorphic(j, k) += t.coeff * monomial(z, t.alpha, t.beta, j, -1, k);
                }
            }
        }
        b.value = val.real();
        return b;
    }
};

}  // namespace

DomainModel polynomial_domain(int dimension, std::vector<MonomialTerm> terms,
                              RVec coord_radius, CVec interior_anchor) {
    for (const auto& t : terms) {
        if (static_cast<int>(t.alpha.size()) != dimension || static_cast<int>(t.beta.size()) != dimension)
            throw ArgumentError("polynomial_domain: multi-index length must equal the dimension");
    }
    // Hermitian symmetry: for every (alpha, beta) term the table must carry
    // the mirrored (beta, alpha) term with the same coefficient.
    for (const auto& t : terms) {
        double mirrored = 0.0;
        for (const auto& u : terms)
            if (u.alpha == t.beta && u.beta == t.alpha) mirrored += u.coeff;
        double same = 0.0;
        for (const auto& u : terms)
            if (u.alpha == t.alpha && u.beta == t.beta) same += u.coeff;
        if (std::abs(mirrored - same) > 1e-12 * std::max(1.0, std::abs(same)))
            throw ArgumentError("polynomial_domain: coefficient table is not Hermitian-symmetric");
    }

    PolynomialTable table{dimension, std::move(terms)};

    nlohmann::json jterms = nlohmann::json::array();
    for (const auto& t : table.terms)
        jterms.push_back({{"alpha", t.alpha}, {"beta", t.beta}, {"coeff", t.coeff}});
    std::vector<double> radii(coord_radius.data(), coord_radius.data() + coord_radius.size());
    std::vector<double> anchor;
    for (int j = 0; j < static_cast<int>(interior_anchor.size()); ++j) {
        anchor.push_back(interior_anchor[j].real());
        anchor.push_back(interior_anchor[j].imag());
    }

    DomainModel::Init init;
    init.name = "custom";
    init.dimension = dimension;
    init.rho = [table](const CVec& z) { return table.rho(z); };
    init.derivatives = [table](const CVec& z) { return table.derivatives(z); };
    init.coord_radius = std::move(coord_radius);
    init.interior_anchor = std::move(interior_anchor);
    init.spec = {{"name", "custom"},
                 {"dimension", dimension},
                 {"params", nlohmann::json::array()},
                 {"defining_fn", {{"terms", jterms}}},
                 {"coord_radius", radii},
                 {"anchor", anchor}};
    return DomainModel(std::move(init));
}

DomainModel domain_from_function(int dimension, DomainModel::RhoFn rho,
                                 RVec coord_radius, CVec interior_anchor) {
    DomainModel::Init init;
    init.name = "callback";
    init.dimension = dimension;
    init.rho = rho;
    init.derivatives = [rho](const CVec& z) { return finite_difference_bundle(rho, z); };
    init.coord_radius = std::move(coord_radius);
    init.interior_anchor = std::move(interior_anchor);
    init.spec = {{"name", "callback"}, {"dimension", dimension}};
    return DomainModel(std::move(init));
}

DomainModel transformed_domain(const DomainModel& base, const CMat& A, const CVec& b) {
    const int n = base.dimension();
    if (A.rows() != n || A.cols() != n || static_cast<int>(b.size()) != n)
        throw ArgumentError("transformed_domain: map shape does not match the domain dimension");
    const CMat B = A.inverse();
    if (!B.allFinite()) throw ArgumentError("transformed_domain: map is singular");
    const double det_jac = std::norm(Complex(B.determinant()));  // |det A^{-1}|^2
    const bool unitary = (A.adjoint() * A - CMat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12;

    auto pull = [B, b](const CVec& w) -> CVec { return B * (w - b); };

    DomainModel::Init init;
    init.name = base.name() + "_transformed";
    init.dimension = n;
    init.params = base.params();
    init.rho = [base, pull](const CVec& w) { return base.rho(pull(w)); };
    init.derivatives = [base, pull, B](const CVec& w) {
        DerivativeBundle d = base.derivatives(pull(w));
        DerivativeBundle out;
        out.value = d.value;
        out.grad = B.transpose() * d.grad;
        out.hermitian = B.transpose() * d.hermitian * B.conjugate();
        out.holomorphic = B.transpose() * d.holomorphic * B;
        return out;
    };
    if (base.has_kernel_oracle())
        init.kernel_oracle = [base, pull, det_jac](const CVec& w) {
            return base.kernel_oracle(pull(w)) * det_jac;
        };
    if (base.has_distance_oracle() && unitary)
        init.distance_oracle = [base, pull](const CVec& w) { return base.distance_oracle(pull(w)); };
    if (base.has_metric_oracle())
        init.metric_oracle = [base, pull, B](const CVec& w, const CVec& X) {
            return base.metric_oracle(pull(w), B * X);
        };
    if (base.has_leaf_basis())
        init.leaf_basis = [base, pull, A](const CVec& w) -> CMat {
            CMat L = A * base.leaf_basis(pull(w));
            // Re-orthonormalize the transported leaf directions.
            if (L.cols() > 0) {
                Eigen::HouseholderQR<CMat> qr(L);
                CMat Q = qr.householderQ() * CMat::Identity(L.rows(), L.cols());
                return Q;
            }
            return L;
        };

    // Transported coordinate bounds: |(Az+b)_j| <= sum_k |A_jk| r_k + |b_j|.
    RVec radius(n);
    for (int j = 0; j < n; ++j) {
        double r = std::abs(b[j]);
        for (int k = 0; k < n; ++k) r += std::abs(A(j, k)) * base.coord_radius()[k];
        radius[j] = r;
    }
    init.coord_radius = radius;
    init.interior_anchor = A * base.interior_anchor() + b;
    init.spec = {{"name", init.name}, {"dimension", n}};
    return DomainModel(std::move(init));
}

nlohmann::json domain_to_json(const DomainModel& domain) { return domain.spec(); }

DomainModel domain_from_json(const nlohmann::json& j) {
    if (!j.contains("name") || !j.contains("dimension"))
        throw ArgumentError("domain JSON requires 'name' and 'dimension'");
    const std::string name = j.at("name").get<std::string>();
    const int dim = j.at("dimension").get<int>();
    std::vector<double> params;
    if (j.contains("params")) params = j.at("params").get<std::vector<double>>();

    if (name != "custom") return catalog_domain(name, dim, params);

    if (!j.contains("defining_fn") || !j.at("defining_fn").contains("terms"))
        throw ArgumentError("custom domain JSON requires defining_fn.terms");
    std::vector<MonomialTerm> terms;
    for (const auto& jt : j.at("defining_fn").at("terms")) {
        MonomialTerm t;
        t.alpha = json_to_multiindex(jt.at("alpha"), dim);
        t.beta = json_to_multiindex(jt.at("beta"), dim);
        t.coeff = jt.at("coeff").get<double>();
        terms.push_back(std::move(t));
    }
    RVec radius = RVec::Ones(dim);
    if (j.contains("coord_radius")) {
        auto r = j.at("coord_radius").get<std::vector<double>>();
        if (static_cast<int>(r.size()) != dim)
            throw ArgumentError("coord_radius must have one entry per coordinate");
        radius = Eigen::Map<const RVec>(r.data(), dim);
    }
    CVec anchor = CVec::Zero(dim);
    if (j.contains("anchor")) {
        auto a = j.at("anchor").get<std::vector<double>>();
        if (static_cast<int>(a.size()) != 2 * dim)
            throw ArgumentError("anchor must list re/im pairs for every coordinate");
        for (int k = 0; k < dim; ++k) anchor[k] = Complex(a[2 * k], a[2 * k + 1]);
    }
    return polynomial_domain(dim, std::move(terms), std::move(radius), std::move(anchor));
}

}  // namespace pcvx
