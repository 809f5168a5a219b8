#include <pcvx/chart.hpp>

#include <pcvx/distance.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace pcvx {

namespace {

// Quadratic form v^T S v (not Hermitian: holomorphic in v).
Complex quad_form(const CMat& S, const CVec& v) {
    if (S.rows() == 0) return Complex(0.0, 0.0);
    return (v.transpose() * S * v)(0, 0);
}

CVec random_unit_cvec(int n, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVec v(n);
    for (int j = 0; j < n; ++j) v(j) = Complex(gauss(rng), gauss(rng));
    double nrm = v.norm();
    if (nrm < 1e-300) {
        v.setZero();
        v(0) = Complex(1.0, 0.0);
        return v;
    }
    return v / nrm;
}

}  // namespace

CVec NormalizedChart::to_chart(const CVec& z) const {
    CVec xi = rotation * (z - base_point);
    CVec zeta = xi;
    if (rank > 0) {
        const CVec block = xi.segment(1, rank);
        zeta(0) = xi(0) + quad_form(shear, block);
    }
    return zeta;
}

CVec NormalizedChart::from_chart(const CVec& zeta) const {
    CVec xi = zeta;
    if (rank > 0) {
        const CVec block = zeta.segment(1, rank);
        xi(0) = zeta(0) - quad_form(shear, block);
    }
    return base_point + rotation.adjoint() * xi;
}

CMat NormalizedChart::jacobian_from_chart(const CVec& zeta) const {
    // d(from_chart)/d zeta = V * M, V = rotation^H, where M is the identity
    // except the first row: d xi_0 / d zeta_k = -2 (S zeta')_{k-1} on the
    // strictly pseudoconvex block.
    const CMat V = rotation.adjoint();
    CMat J = V;
    if (rank > 0) {
        const CVec srow = shear * zeta.segment(1, rank);
        for (int k = 0; k < rank; ++k) {
            J.col(1 + k) += V.col(0) * (-2.0 * srow(k));
        }
    }
    return J;
}

double NormalizedChart::rho(const CVec& zeta) const {
    if (rho_value_fn_) return rho_value_fn_(zeta);
    return rho_fn_(zeta).value;
}

DerivativeBundle NormalizedChart::rho_derivatives(const CVec& zeta) const {
    return rho_fn_(zeta);
}

bool NormalizedChart::solve_graph(double im0, const CVec& tail, double& re0) const {
    if (tail.size() != dim - 1) throw ArgumentError("solve_graph: tail has wrong size");
    CVec zeta(dim);
    zeta(0) = Complex(0.0, im0);
    for (int j = 1; j < dim; ++j) zeta(j) = tail(j - 1);

    // Initial guess from the model terms.
    double t = 0.0;
    for (int j = 0; j < rank; ++j) t -= lambda(j) * std::norm(tail(j));

    const double cap = std::max(1.0, 4.0 * valid_radius + 1.0);
    for (int iter = 0; iter < 60; ++iter) {
        zeta(0) = Complex(t, im0);
        DerivativeBundle b = rho_fn_(zeta);
        if (std::abs(b.value) <= 1e-13) {
            re0 = t;
            return true;
        }
        const double slope = 2.0 * b.grad(0).real();
        if (std::abs(slope) < 1e-10) return false;
        double step = -b.value / slope;
        if (std::abs(step) > 0.5 * cap) step = (step > 0 ? 0.5 : -0.5) * cap;
        t += step;
        if (std::abs(t) > cap) return false;
    }
    return false;
}

NormalizedChart NormalizedChart::model(int dim, int l, RVec lambda_positive,
                                       double valid_radius) {
    if (dim < 1) throw ArgumentError("model chart needs dimension >= 1");
    if (l < 0 || l > dim - 1) throw ArgumentError("model chart: invalid null dimension");
    const int rank = dim - 1 - l;
    if (lambda_positive.size() != rank)
        throw ArgumentError("model chart: lambda size must equal dim-1-l");
    for (int j = 0; j < rank; ++j)
        if (!(lambda_positive(j) > 0)) throw ArgumentError("model chart: lambda must be positive");
    std::sort(lambda_positive.data(), lambda_positive.data() + lambda_positive.size(),
              std::greater<double>());

    NormalizedChart c;
    c.base_point = CVec::Zero(dim);
    c.rotation = CMat::Identity(dim, dim);
    c.shear = CMat::Zero(rank, rank);
    c.lambda = lambda_positive;
    c.dim = dim;
    c.rank = rank;
    c.l = l;
    c.grad_norm = 0.5;
    c.zeta1_rescale = 1.0;
    c.valid_radius = valid_radius;
    c.residual_constant = 0.0;
    c.peak_radius = valid_radius;

    const RVec lam = lambda_positive;
    c.rho_value_fn_ = [rank, lam](const CVec& zeta) {
        double v = zeta(0).real();
        for (int j = 0; j < rank; ++j) v += lam(j) * std::norm(zeta(1 + j));
        return v;
    };
    c.rho_fn_ = [dim, rank, lam](const CVec& zeta) {
        DerivativeBundle b;
        b.value = zeta(0).real();
        b.grad = CVec::Zero(dim);
        b.grad(0) = Complex(0.5, 0.0);
        b.hermitian = CMat::Zero(dim, dim);
        b.holomorphic = CMat::Zero(dim, dim);
        for (int j = 0; j < rank; ++j) {
            b.value += lam(j) * std::norm(zeta(1 + j));
            b.grad(1 + j) = lam(j) * std::conj(zeta(1 + j));
            b.hermitian(1 + j, 1 + j) = lam(j);
        }
        return b;
    };
    return c;
}

namespace {

// Pullback of the domain's defining function through the inverse chart map,
// divided by the normalization factor.  G(zeta) = p + V xi(zeta) is
// holomorphic, so the Hermitian block transforms by a pure sandwich and the
// holomorphic block picks up a gradient term from the shear curvature.
std::function<DerivativeBundle(const CVec&)> make_chart_rho_fn(
    const DomainModel& domain, const CVec& p, const CMat& V, const CMat& S,
    double rescale, int rank) {
    return [domain, p, V, S, rescale, rank](const CVec& zeta) {
        CVec xi = zeta;
        if (rank > 0) {
            const CVec block = zeta.segment(1, rank);
            xi(0) = zeta(0) - (block.transpose() * S * block)(0, 0);
        }
        const CVec z = p + V * xi;
        DerivativeBundle d = domain.derivatives(z);

        CMat J = V;
        if (rank > 0) {
            const CVec srow = S * zeta.segment(1, rank);
            for (int k = 0; k < rank; ++k) J.col(1 + k) += V.col(0) * (-2.0 * srow(k));
        }

        DerivativeBundle out;
        out.value = d.value / rescale;
        out.grad = (J.transpose() * d.grad) / rescale;
        out.hermitian = (J.transpose() * d.hermitian * J.conjugate()) / rescale;
        CMat hol = J.transpose() * d.holomorphic * J;
        if (rank > 0) {
            const Complex g0 = holomorphic_pairing(d.grad, V.col(0));
            hol.block(1, 1, rank, rank) += (-2.0 * g0) * S;
        }
        out.holomorphic = hol / rescale;
        return out;
    };
}

struct ShellStats {
    bool solved = true;
    double max_ratio = 0.0;
};

ShellStats certify_shell(const NormalizedChart& chart, double s, int n_samples,
                         Rng& rng) {
    const int n = chart.dim;
    ShellStats st;
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int sample = 0; sample < n_samples; ++sample) {
        // Uniform direction on the sphere in the (Im zeta_0, zeta_1..)
        // parameter space, scaled to radius s.
        RVec g(2 * n - 1);
        for (int j = 0; j < g.size(); ++j) g(j) = gauss(rng);
        double nrm = g.norm();
        if (nrm < 1e-300) continue;
        g *= s / nrm;

        const double im0 = g(0);
        CVec tail(n - 1);
        for (int j = 0; j < n - 1; ++j) tail(j) = Complex(g(1 + 2 * j), g(2 + 2 * j));

        double t = 0.0;
        if (!chart.solve_graph(im0, tail, t)) {
            st.solved = false;
            return st;
        }

        double model = t;
        double sp_norm2 = 0.0;
        for (int j = 0; j < chart.rank; ++j) {
            model += chart.lambda(j) * std::norm(tail(j));
            sp_norm2 += std::norm(tail(j));
        }
        double null_norm2 = 0.0;
        for (int j = chart.rank; j < n - 1; ++j) null_norm2 += std::norm(tail(j));

        const double residual = std::abs(model);
        const double sp = std::sqrt(sp_norm2);
        const double nl = std::sqrt(null_norm2);
        const double point_norm = std::sqrt(t * t + im0 * im0 + sp_norm2 + null_norm2);
        const double denom = sp * sp * sp + sp * sp * nl + std::abs(im0) * point_norm;

        if (denom < 1e-16) {
            if (residual > 1e-11) {
                st.solved = false;
                return st;
            }
            continue;
        }
        st.max_ratio = std::max(st.max_ratio, residual / denom);
    }
    return st;
}

bool certify_leaf_shell(const NormalizedChart& chart, double s, int n_samples,
                        Rng& rng) {
    // Pure Levi-null directions: the error form vanishes identically there,
    // so the graph height itself must vanish (the boundary contains the
    // affine leaf through the base point).
    const int n = chart.dim;
    if (chart.l == 0) return true;
    for (int sample = 0; sample < n_samples; ++sample) {
        CVec tail = CVec::Zero(n - 1);
        CVec dir = random_unit_cvec(chart.l, rng);
        for (int j = 0; j < chart.l; ++j) tail(chart.rank + j) = s * dir(j);
        double t = 0.0;
        if (!chart.solve_graph(0.0, tail, t)) return false;
        if (std::abs(t) > 1e-9 * std::max(1.0, s)) return false;
    }
    return true;
}

void certify_residual(NormalizedChart& chart, double r_base, Rng& rng) {
    constexpr int kShells = 6;
    constexpr int kSamples = 400;
    constexpr int kLeafSamples = 60;

    std::array<bool, kShells> solved{};
    std::array<double, kShells> ratio{};
    for (int k = 0; k < kShells; ++k) {
        const double s = r_base * std::pow(2.0, -k);
        ShellStats st = certify_shell(chart, s, kSamples, rng);
        bool ok = st.solved;
        if (ok && !certify_leaf_shell(chart, s, kLeafSamples, rng)) ok = false;
        solved[k] = ok;
        ratio[k] = st.max_ratio;
    }

    for (int k_start = 0; k_start + 1 < kShells; ++k_start) {
        bool all = true;
        for (int k = k_start; k < kShells; ++k) all = all && solved[k];
        if (!all) continue;
        double big = 0.0;
        for (int k = k_start; k + 1 < kShells; ++k) big = std::max(big, ratio[k]);
        const double small = ratio[kShells - 1];
        // The residual-to-error-form ratio must stay uniformly bounded as the
        // shell radius shrinks; growth toward small radii means the quadratic
        // model is wrong (bad eigenvalue, shear, or leaf data).
        if (small <= 1.6 * big + 1e-9) {
            chart.valid_radius = r_base * std::pow(2.0, -k_start);
            double c = small;
            for (int k = k_start; k < kShells; ++k) c = std::max(c, ratio[k]);
            chart.residual_constant = 1.05 * c + 1e-12;
            return;
        }
    }
    throw CertificationError(
        "chart normalization: residual bound failed dyadic certification");
}

void certify_peak_radius(NormalizedChart& chart, Rng& rng) {
    const int n = chart.dim;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double s = chart.valid_radius;
    for (int attempt = 0; attempt < 8; ++attempt, s *= 0.5) {
        bool ok = true;
        int kept = 0;
        for (int draw = 0; draw < 8000 && kept < 400; ++draw) {
            CVec zeta = random_unit_cvec(n, rng);
            zeta *= s * std::pow(unif(rng), 1.0 / (2.0 * n));
            if (chart.rho(zeta) >= 0.0) continue;
            ++kept;
            if (zeta(0).real() >= std::abs(zeta(0).imag())) {
                ok = false;
                break;
            }
        }
        if (ok && kept >= 100) {
            chart.peak_radius = s;
            return;
        }
    }
    throw CertificationError(
        "chart normalization: peak wedge condition failed at all radii");
}

}  // namespace

NormalizedChart normalize_chart(const DomainModel& domain, const CVec& p_in,
                                unsigned seed) {
    const int n = domain.dimension();
    domain.check_dimension(p_in, "normalize_chart");

    ProjectionResult proj = project_to_boundary(domain, p_in);
    if (!proj.converged)
        throw NumericalError("normalize_chart: boundary projection did not converge");
    const CVec p = proj.foot;

    LeviData base = levi_rank(domain, p);
    const int rank = base.rank;
    const int l = n - 1 - rank;

    Rng rng(seed);

    // The construction assumes the Levi rank is locally constant; sample
    // nearby boundary points and insist on the same rank.
    {
        const double scale = 0.015 * domain.circumradius();
        int checked = 0;
        for (int attempt = 0; attempt < 60 && checked < 20; ++attempt) {
            CVec q = p + scale * random_unit_cvec(n, rng);
            ProjectionResult pr = project_to_boundary(domain, q);
            if (!pr.converged) continue;
            LeviData nearby = levi_rank(domain, pr.foot);
            if (nearby.rank != rank)
                throw StructureError(
                    "normalize_chart: Levi rank is not constant near the base point");
            ++checked;
        }
        if (checked < 20)
            throw NumericalError(
                "normalize_chart: could not sample nearby boundary points");
    }

    // Unitary frame: outward-normal column, positive Levi directions in
    // descending eigenvalue order, Levi-null directions last.
    const double s0 = base.gradient.norm();
    CMat V(n, n);
    V.col(0) = base.gradient.conjugate() / s0;
    for (int j = 0; j < rank; ++j) V.col(1 + j) = base.positive_basis.col(j);
    if (l > 0) {
        if (!domain.has_leaf_basis())
            throw StructureError(
                "normalize_chart: degenerate Levi rank requires foliation leaf data");
        CMat leaf = domain.leaf_basis(p);
        if (leaf.rows() != n || leaf.cols() != l)
            throw StructureError("normalize_chart: leaf basis has wrong shape");
        Eigen::HouseholderQR<CMat> qr(leaf);
        CMat Q = qr.householderQ() * CMat::Identity(n, l);
        for (int j = 0; j < l; ++j) {
            if (std::abs(holomorphic_pairing(base.gradient, Q.col(j))) > 1e-7 * s0)
                throw StructureError(
                    "normalize_chart: leaf basis is not tangent to the boundary");
        }
        const CMat diff = Q * Q.adjoint() - base.null_basis * base.null_basis.adjoint();
        if (diff.norm() > 1e-6)
            throw StructureError(
                "normalize_chart: leaf basis does not span the Levi null space");
        for (int j = 0; j < l; ++j) V.col(1 + rank + j) = base.null_basis.col(j);
    }
    if ((V.adjoint() * V - CMat::Identity(n, n)).norm() > 1e-8)
        throw NumericalError("normalize_chart: chart frame lost unitarity");

    const double rescale = 2.0 * s0;
    DerivativeBundle d0 = domain.derivatives(p);
    const CMat S_xi = V.transpose() * d0.holomorphic * V;

    NormalizedChart chart;
    chart.base_point = p;
    chart.rotation = V.adjoint();
    chart.dim = n;
    chart.rank = rank;
    chart.l = l;
    chart.grad_norm = s0;
    chart.zeta1_rescale = rescale;
    chart.lambda = RVec(rank);
    for (int j = 0; j < rank; ++j) chart.lambda(j) = base.eigenvalues(j) / rescale;
    chart.shear = CMat::Zero(rank, rank);
    if (rank > 0) {
        CMat block = S_xi.block(1, 1, rank, rank) / rescale;
        chart.shear = 0.5 * (block + block.transpose());
    }
    chart.valid_radius = 0.25 * domain.circumradius();

    chart.rho_fn_ = make_chart_rho_fn(domain, p, V, chart.shear, rescale, rank);
    {
        const CMat Vc = V;
        const CVec pc = p;
        const CMat Sc = chart.shear;
        const DomainModel dom = domain;
        const int rk = rank;
        chart.rho_value_fn_ = [dom, pc, Vc, Sc, rk, rescale](const CVec& zeta) {
            CVec xi = zeta;
            if (rk > 0) {
                const CVec block = zeta.segment(1, rk);
                xi(0) = zeta(0) - (block.transpose() * Sc * block)(0, 0);
            }
            return dom.rho(pc + Vc * xi) / rescale;
        };
    }

    certify_residual(chart, 0.25 * domain.circumradius(), rng);
    certify_peak_radius(chart, rng);
    return chart;
}

Complex peak_function(const NormalizedChart& chart, const CVec& z) {
    if (z.size() != chart.dim) throw ArgumentError("peak_function: wrong dimension");
    const CVec zeta = chart.to_chart(z);
    if (zeta.norm() > chart.peak_radius * (1.0 + 1e-12))
        throw ArgumentError("peak_function: point lies outside the certified patch");
    const Complex w = -zeta(0);
    if (std::abs(w) == 0.0) return Complex(1.0, 0.0);
    return std::exp(-std::pow(w, 2.0 / 3.0));
}

nlohmann::json chart_to_json(const NormalizedChart& chart) {
    auto cvec = [](const CVec& v) {
        nlohmann::json arr = nlohmann::json::array();
        for (int j = 0; j < v.size(); ++j)
            arr.push_back({{"re", v(j).real()}, {"im", v(j).imag()}});
        return arr;
    };
    auto cmat = [&](const CMat& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < m.cols(); ++j)
                row.push_back({{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::json out;
    out["base_point"] = cvec(chart.base_point);
    out["rotation"] = cmat(chart.rotation);
    out["shear"] = cmat(chart.shear);
    out["lambda"] = std::vector<double>(chart.lambda.data(),
                                        chart.lambda.data() + chart.lambda.size());
    out["dim"] = chart.dim;
    out["levi_rank"] = chart.rank;
    out["null_dimension"] = chart.l;
    out["grad_norm"] = chart.grad_norm;
    out["zeta1_rescale"] = chart.zeta1_rescale;
    out["valid_radius"] = chart.valid_radius;
    out["residual_constant"] = chart.residual_constant;
    out["peak_radius"] = chart.peak_radius;
    return out;
}

}  // namespace pcvx
