#include <pcvx/kobayashi.hpp>

#include <pcvx/distance.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace pcvx {

namespace {

// h(w) = sum_{k=1}^{degree} coeff.col(k-1) w^k, by Horner.
CVec disc_offset(const CMat& coeff, Complex w) {
    const int degree = static_cast<int>(coeff.cols());
    CVec acc = coeff.col(degree - 1);
    for (int k = degree - 1; k >= 1; --k) acc = (w * acc + coeff.col(k - 1)).eval();
    return w * acc;
}

// max of rho(z + h(s e^{i theta})) over equispaced circle samples.  For
// plurisubharmonic rho this dominates rho on the whole closed disc up to the
// sampling resolution, by the maximum principle applied to rho o f.
double worst_margin(const DomainModel& domain, const CVec& z, const CMat& coeff,
                    double s, int samples) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / samples;
        const Complex w = s * Complex(std::cos(theta), std::sin(theta));
        worst = std::max(worst, domain.rho(z + disc_offset(coeff, w)));
    }
    return worst;
}

// Largest s with the sampled circle inside {rho <= -margin}, by bisection.
// Containment of {z + h(w) : |w| < s} is monotone in s, so feasibility is a
// one-sided interval.
double best_radius(const DomainModel& domain, const CVec& z, const CMat& coeff,
                   double margin, int samples, double hi_start) {
    const auto feasible = [&](double s) {
        return worst_margin(domain, z, coeff, s, samples) <= -margin;
    };
    double lo = 0.0;
    double hi = hi_start;
    while (feasible(hi)) {
        hi *= 2.0;
        if (hi > 1e6)
            throw NumericalError(
                "kobayashi_upper_disc: no infeasible disc scale below 1e6; the domain "
                "does not look bounded");
    }
    for (int iter = 0; iter < 48; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

CMat unpack_shape(const CVec& direction, const std::vector<double>& x, int n, int degree) {
    CMat coeff(n, degree);
    coeff.col(0) = direction;
    int idx = 0;
    for (int k = 2; k <= degree; ++k)
        for (int j = 0; j < n; ++j) {
            coeff(j, k - 1) = Complex(x[idx], x[idx + 1]);
            idx += 2;
        }
    return coeff;
}

// Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2) over
// the real/imaginary parts of the degree >= 2 coefficients, maximizing the
// feasible disc scale.  Seeded at the zero shape so the result never falls
// below the linear-disc bound.
struct ShapeSearch {
    std::vector<double> best_x;
    double best_s = 0.0;
};

ShapeSearch optimize_shape(const DomainModel& domain, const CVec& z, const CVec& direction,
                           const DiscFamily& family, double margin, double step,
                           double hi_start) {
    const int n = static_cast<int>(z.size());
    const int m = 2 * n * (family.degree - 1);
    int evals = 0;
    const auto objective = [&](const std::vector<double>& x) {
        ++evals;
        const CMat coeff = unpack_shape(direction, x, n, family.degree);
        return -best_radius(domain, z, coeff, margin, family.constraint_samples, hi_start);
    };

    std::mt19937_64 rng(family.seed);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);

    std::vector<std::vector<double>> simplex(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> value(m + 1);
    for (int i = 1; i <= m; ++i) {
        for (int c = 0; c < m; ++c) simplex[i][c] = step * jitter(rng);
        simplex[i][i - 1] += step;
    }
    for (int i = 0; i <= m; ++i) value[i] = objective(simplex[i]);

    const auto order = [&]() {
        std::vector<int> idx(m + 1);
        for (int i = 0; i <= m; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return value[a] < value[b]; });
        std::vector<std::vector<double>> s2(m + 1);
        std::vector<double> v2(m + 1);
        for (int i = 0; i <= m; ++i) {
            s2[i] = simplex[idx[i]];
            v2[i] = value[idx[i]];
        }
        simplex.swap(s2);
        value.swap(v2);
    };

    while (evals < family.optimizer_budget) {
        order();
        std::vector<double> centroid(m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int c = 0; c < m; ++c) centroid[c] += simplex[i][c] / m;

        const auto blend = [&](double t) {
            std::vector<double> p(m);
            for (int c = 0; c < m; ++c) p[c] = centroid[c] + t * (centroid[c] - simplex[m][c]);
            return p;
        };

        const std::vector<double> refl = blend(1.0);
        const double f_refl = objective(refl);
        if (f_refl < value[0]) {
            const std::vector<double> expa = blend(2.0);
            const double f_expa = objective(expa);
            if (f_expa < f_refl) {
                simplex[m] = expa;
                value[m] = f_expa;
            } else {
                simplex[m] = refl;
                value[m] = f_refl;
            }
        } else if (f_refl < value[m - 1]) {
            simplex[m] = refl;
            value[m] = f_refl;
        } else {
            const std::vector<double> contr = blend(f_refl < value[m] ? 0.5 : -0.5);
            const double f_contr = objective(contr);
            if (f_contr < std::min(f_refl, value[m])) {
                simplex[m] = contr;
                value[m] = f_contr;
            } else {
                for (int i = 1; i <= m; ++i) {
                    for (int c = 0; c < m; ++c)
                        simplex[i][c] = 0.5 * (simplex[i][c] + simplex[0][c]);
                    value[i] = objective(simplex[i]);
                    if (evals >= family.optimizer_budget) break;
                }
            }
        }
    }
    order();
    return ShapeSearch{simplex[0], -value[0]};
}

// Distance derivatives of the boundary-distance function at z, in closed
// form for a single ball factor spanning the listed coordinates.
struct DistanceData {
    double delta = 0.0;
    Complex pairing;     // <d_z d, X>
    double levi = 0.0;   // L_d(X)
};

DistanceData ball_face(const CVec& z, const CVec& X, const std::vector<int>& coords) {
    CVec zb(coords.size()), Xb(coords.size());
    for (size_t i = 0; i < coords.size(); ++i) {
        zb(static_cast<int>(i)) = z(coords[i]);
        Xb(static_cast<int>(i)) = X(coords[i]);
    }
    const double r = zb.norm();
    if (r <= 1e-8)
        throw NumericalError(
            "comparability_M: the boundary-distance function is singular at the "
            "center of a ball factor");
    DistanceData out;
    out.delta = 1.0 - r;
    const Complex inner = hermitian_dot(Xb, zb);  // sum X_j conj(z_j)
    out.pairing = -inner / (2.0 * r);             // <d_z(1 - |z|), X>
    out.levi = -(Xb.squaredNorm() / (2.0 * r) - std::norm(inner) / (4.0 * r * r * r));
    return out;
}

}  // namespace

DiscBound kobayashi_upper_disc(const DomainModel& domain, const CVec& z, const CVec& X,
                               const DiscFamily& family) {
    domain.check_dimension(z, "kobayashi_upper_disc");
    domain.check_dimension(X, "kobayashi_upper_disc");
    if (family.degree < 1) throw ArgumentError("kobayashi_upper_disc: degree must be >= 1");
    if (family.constraint_samples < 8 || family.verify_samples < 8)
        throw ArgumentError("kobayashi_upper_disc: need at least 8 circle samples");
    const double xnorm = X.norm();
    if (xnorm == 0.0)
        throw ArgumentError("kobayashi_upper_disc: direction must be nonzero");
    const double rho_z = domain.rho(z);
    if (rho_z >= 0.0)
        throw ArgumentError("kobayashi_upper_disc: the base point must lie inside the domain");

    const double margin = std::min(1e-10, 0.5 * std::abs(rho_z));
    const CVec direction = X / xnorm;
    const int n = static_cast<int>(z.size());
    const double hi_start = domain.circumradius() + z.norm() + 1.0;

    // Search with a phase-canonical direction (largest component rotated onto
    // the positive real axis) so the certified scale depends on X only through
    // its complex line; the phase is restored on the reported coefficients.
    int lead = 0;
    for (int j = 1; j < n; ++j)
        if (std::abs(direction(j)) > std::abs(direction(lead))) lead = j;
    const Complex phase = direction(lead) / std::abs(direction(lead));
    const CVec canonical = direction / phase;

    CMat coeff;
    if (family.degree == 1) {
        coeff = canonical;
    } else {
        const double dist = distance_to_boundary(domain, z);
        const ShapeSearch found = optimize_shape(domain, z, canonical, family, margin,
                                                 0.25 * std::max(dist, 1e-6), hi_start);
        coeff = unpack_shape(canonical, found.best_x, n, family.degree);
    }

    double s = best_radius(domain, z, coeff, margin, family.constraint_samples, hi_start);
    int shrinks = 0;
    while (worst_margin(domain, z, coeff, s, family.verify_samples) > -margin) {
        s *= 0.99;
        ++shrinks;
        if (shrinks > family.max_shrinks)
            throw CertificationError(
                "kobayashi_upper_disc: dense circle verification kept failing after "
                "the shrink budget; the sampled radius search was too optimistic");
    }
    if (s <= 0.0)
        throw NumericalError("kobayashi_upper_disc: certified disc scale collapsed to zero");

    DiscBound out;
    out.speed = s;
    out.upper = xnorm / s;
    out.shrinks = shrinks;
    out.coefficients = CMat(n, family.degree);
    const Complex step = s * phase;
    Complex sk = step;
    for (int k = 1; k <= family.degree; ++k) {
        out.coefficients.col(k - 1) = coeff.col(k - 1) * sk;
        sk *= step;
    }
    return out;
}

double kobayashi_upper(const DomainModel& domain, const CVec& z, const CVec& X, int degree) {
    DiscFamily family;
    family.degree = degree;
    return kobayashi_upper_disc(domain, z, X, family).upper;
}

double sibony_lower(const DomainModel& domain, const CVec& z, const CVec& X,
                    const PshWitness& witness) {
    domain.check_dimension(z, "sibony_lower");
    domain.check_dimension(X, "sibony_lower");
    if ((witness.center() - z).norm() > 1e-10 * std::max(1.0, z.norm()))
        throw ArgumentError("sibony_lower: the witness must be centered at the evaluation point");
    return std::sqrt(std::max(0.0, witness.center_levi(X)));
}

double sibony_lower(const DomainModel& domain, const CVec& z, const CVec& X) {
    return sibony_lower(domain, z, X, domain_witness(domain, z));
}

double comparability_M(const DomainModel& domain, const CVec& z, const CVec& X) {
    domain.check_dimension(z, "comparability_M");
    domain.check_dimension(X, "comparability_M");
    if (domain.rho(z) >= 0.0)
        throw ArgumentError("comparability_M: the point must lie inside the domain");

    const int n = domain.dimension();
    DistanceData data;
    if (domain.name() == "ball") {
        std::vector<int> coords(n);
        for (int j = 0; j < n; ++j) coords[j] = j;
        data = ball_face(z, X, coords);
    } else if (domain.name() == "polydisc") {
        int face = 0;
        for (int j = 1; j < n; ++j)
            if (std::abs(z(j)) > std::abs(z(face))) face = j;
        data = ball_face(z, X, {face});
    } else if (domain.name() == "product_disc_ball") {
        const double disc_dist = 1.0 - std::abs(z(0));
        const double ball_dist = 1.0 - std::hypot(std::abs(z(1)), std::abs(z(2)));
        data = (disc_dist <= ball_dist) ? ball_face(z, X, {0}) : ball_face(z, X, {1, 2});
    } else {
        const double delta = distance_to_boundary(domain, z);
        const DerivativeBundle b = finite_difference_bundle(
            [&domain](const CVec& w) { return distance_to_boundary(domain, w); }, z,
            1e-4 * delta);
        data.delta = delta;
        data.pairing = holomorphic_pairing(b.grad, X);
        data.levi = (X.transpose() * b.hermitian * X.conjugate())(0, 0).real();
    }

    return std::abs(data.levi) / data.delta + std::norm(data.pairing) / (data.delta * data.delta);
}

}  // namespace pcvx
