#include <pcvx/witness.hpp>

#include <pcvx/cutoffs.hpp>
#include <pcvx/distance.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace pcvx {

namespace {

CVec sample_polydisc(const CVec& center, const RVec& beta, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    CVec z(center.size());
    for (int j = 0; j < center.size(); ++j) {
        const double r = beta(j) * std::sqrt(unif(rng));
        const double th = 2.0 * std::numbers::pi * unif(rng);
        z(j) = center(j) + Complex(r * std::cos(th), r * std::sin(th));
    }
    return z;
}

CVec random_unit(int n, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVec v(n);
    for (int j = 0; j < n; ++j) v(j) = Complex(gauss(rng), gauss(rng));
    const double nrm = v.norm();
    if (nrm < 1e-300) {
        v.setZero();
        v(0) = 1.0;
        return v;
    }
    return v / nrm;
}

double aniso(const CVec& Y, const RVec& beta) {
    double s = 0.0;
    for (int j = 0; j < Y.size(); ++j) s += std::norm(Y(j)) / (beta(j) * beta(j));
    return s;
}

}  // namespace

PshWitness::PshWitness(CVec center, RVec beta, DomainModel::DerivFn phi, double M,
                       double alpha, double hessian_floor)
    : center_(std::move(center)),
      beta_(std::move(beta)),
      phi_(std::move(phi)),
      M_(M),
      alpha_(alpha),
      floor_(hessian_floor) {
    if (beta_.size() != center_.size())
        throw ArgumentError("witness: radii list must match the dimension");
    for (int j = 0; j < beta_.size(); ++j)
        if (!(beta_(j) > 0.0)) throw ArgumentError("witness: radii must be positive");
    if (!phi_) throw ArgumentError("witness: phi oracle required");
}

double PshWitness::g(const CVec& z) const {
    double s = 0.0;
    for (int j = 0; j < center_.size(); ++j)
        s += std::norm(z(j) - center_(j)) / (beta_(j) * beta_(j));
    return s;
}

double PshWitness::value(const CVec& z) const {
    const double ph = phi_(z).value;
    return cutoffs::peak(g(z)) * std::exp(M_ * (ph - 1.0));
}

DerivativeBundle PshWitness::derivatives(const CVec& z) const {
    const int n = static_cast<int>(center_.size());
    DerivativeBundle ph = phi_(z);

    const double gv = g(z);
    CVec dg(n);
    for (int j = 0; j < n; ++j)
        dg(j) = std::conj(z(j) - center_(j)) / (beta_(j) * beta_(j));

    const double cv = cutoffs::peak(gv);
    const double cd = cutoffs::peak_d1(gv);
    const double cdd = cutoffs::peak_d2(gv);

    // v = peak(g)
    const CVec dv = cd * dg;
    CMat v_h = cdd * (dg * dg.conjugate().transpose());
    for (int j = 0; j < n; ++j) v_h(j, j) += cd / (beta_(j) * beta_(j));
    const CMat v_s = cdd * (dg * dg.transpose());

    // E = exp(M (phi - 1))
    const double E = std::exp(M_ * (ph.value - 1.0));
    const CVec dE = (M_ * E) * ph.grad;
    const CMat E_h =
        (M_ * E) * (ph.hermitian + M_ * (ph.grad * ph.grad.conjugate().transpose()));
    const CMat E_s = (M_ * E) * (ph.holomorphic + M_ * (ph.grad * ph.grad.transpose()));

    DerivativeBundle out;
    out.value = cv * E;
    out.grad = dv * E + cv * dE;
    out.hermitian = v_h * E + dv * dE.conjugate().transpose() +
                    dE * dv.conjugate().transpose() + cv * E_h;
    out.holomorphic = v_s * E + dv * dE.transpose() + dE * dv.transpose() + cv * E_s;
    return out;
}

double PshWitness::log_levi(const CVec& z, const CVec& Y) const {
    const double gv = g(z);
    if (!(gv > 1e-300))
        throw ArgumentError("witness: log Levi form is singular at the center");
    const int n = static_cast<int>(center_.size());
    CVec dg(n);
    double Lg = 0.0;
    for (int j = 0; j < n; ++j) {
        const double b2 = beta_(j) * beta_(j);
        dg(j) = std::conj(z(j) - center_(j)) / b2;
        Lg += std::norm(Y(j)) / b2;
    }
    Complex pair(0.0, 0.0);
    for (int j = 0; j < n; ++j) pair += dg(j) * Y(j);

    const double cv = cutoffs::peak(gv);
    const double cd = cutoffs::peak_d1(gv);
    const double cdd = cutoffs::peak_d2(gv);
    const double log1 = cd / cv;
    const double log2 = cdd / cv - log1 * log1;

    DerivativeBundle ph = phi_(z);
    const double Lphi = (Y.transpose() * ph.hermitian * Y.conjugate())(0, 0).real();
    return log1 * Lg + log2 * std::norm(pair) + M_ * Lphi;
}

double PshWitness::center_levi(const CVec& X) const {
    return std::exp(center_log_factor()) * aniso(X, beta_);
}

double PshWitness::center_log_factor() const {
    return M_ * (phi_(center_).value - 1.0);
}

PshWitness build_log_psh_witness(const CVec& center, const RVec& beta,
                                 const DomainModel::DerivFn& phi, double alpha,
                                 double hessian_floor, unsigned seed) {
    if (!(hessian_floor > 0.0))
        throw ArgumentError("witness: hessian floor must be positive");
    if (!(alpha >= 0.0)) throw ArgumentError("witness: alpha must be nonnegative");

    const int n = static_cast<int>(center.size());
    Rng rng(seed);

    // Spot-check the phi precondition on the witness polydisc.
    for (int i = 0; i < 1000; ++i) {
        const CVec z = sample_polydisc(center, beta, rng);
        DerivativeBundle b = phi(z);
        if (std::abs(b.value) > 1.0 + 1e-12)
            throw ArgumentError("witness: |phi| <= 1 fails on the polydisc");
        for (int d = 0; d < n + 3; ++d) {
            CVec Y;
            if (d < n) {
                Y = CVec::Zero(n);
                Y(d) = 1.0;
            } else {
                Y = random_unit(n, rng);
            }
            const double L = (Y.transpose() * b.hermitian * Y.conjugate())(0, 0).real();
            if (L < (hessian_floor - 1e-9) * aniso(Y, beta))
                throw ArgumentError("witness: phi Hessian floor fails on the polydisc");
        }
    }

    const double M = std::ceil(1.25 * alpha / hessian_floor);
    PshWitness w(center, beta, phi, M, alpha, hessian_floor);

    // Certify log-plurisubharmonicity by sampling (away from the center,
    // where log u has its admissible -infinity singularity).
    for (int i = 0; i < 1000; ++i) {
        CVec z = sample_polydisc(center, beta, rng);
        if (w.g(z) < 1e-10) continue;
        for (int d = 0; d < 4; ++d) {
            const CVec Y = random_unit(n, rng);
            const double L = w.log_levi(z, Y);
            if (L < -1e-8 * aniso(Y, beta))
                throw CertificationError(
                    "witness: log-plurisubharmonicity certification failed");
        }
    }
    return w;
}

PshWitness domain_witness(const DomainModel& domain, const CVec& center,
                          double shrink, unsigned seed) {
    domain.check_dimension(center, "domain_witness");
    if (!(shrink > 0.0) || shrink >= 1.0)
        throw ArgumentError("domain_witness: shrink must lie in (0,1)");
    const int n = domain.dimension();
    const double dist = distance_to_boundary(domain, center);
    RVec beta = RVec::Constant(n, shrink * dist / std::sqrt(static_cast<double>(n)));

    const double R0 = 1.05 * domain.circumradius();
    DomainModel::DerivFn phi = [n, R0](const CVec& z) {
        DerivativeBundle b;
        b.value = z.squaredNorm() / (R0 * R0) - 1.0;
        b.grad = z.conjugate() / (R0 * R0);
        b.hermitian = CMat::Identity(n, n) / (R0 * R0);
        b.holomorphic = CMat::Zero(n, n);
        return b;
    };
    const double floor = beta(0) * beta(0) / (R0 * R0);
    return build_log_psh_witness(center, beta, phi, cutoffs::peak_alpha(), floor,
                                 seed);
}

}  // namespace pcvx
