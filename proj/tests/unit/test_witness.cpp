#include <doctest.h>

#include <pcvx/cutoffs.hpp>
#include <pcvx/distance.hpp>
#include <pcvx/witness.hpp>

#include <cmath>

using namespace pcvx;

namespace {

// phi(z) = |z|^2 / R^2 - 1: plurisubharmonic, |phi| <= 1 near 0 for modest R,
// Levi form |Y|^2 / R^2.
DomainModel::DerivFn quadratic_phi(int n, double R) {
    return [n, R](const CVec& z) {
        DerivativeBundle b;
        b.value = z.squaredNorm() / (R * R) - 1.0;
        b.grad = z.conjugate() / (R * R);
        b.hermitian = CMat::Identity(n, n) / (R * R);
        b.holomorphic = CMat::Zero(n, n);
        return b;
    };
}

DomainModel::DerivFn zero_phi(int n) {
    return [n](const CVec&) {
        DerivativeBundle b;
        b.value = 0.0;
        b.grad = CVec::Zero(n);
        b.hermitian = CMat::Zero(n, n);
        b.holomorphic = CMat::Zero(n, n);
        return b;
    };
}

}  // namespace

TEST_CASE("witness with trivial exponential factor reduces to the bump") {
    const int n = 2;
    PshWitness w(CVec::Zero(n), RVec::Ones(n), zero_phi(n), /*M=*/0.0,
                 /*alpha=*/0.0, /*floor=*/1.0);

    CHECK(w.value(CVec::Zero(n)) == 0.0);
    CHECK(w.center_log_factor() == doctest::Approx(0.0));

    CVec X(n);
    X << Complex(0.6, -0.2), Complex(0.1, 0.3);
    CHECK(w.center_levi(X) == doctest::Approx(X.squaredNorm()).epsilon(1e-12));

    // inside the identity window of the saturation profile, u(z) = g(z)
    CVec z(n);
    z << Complex(0.3, 0.1), Complex(-0.2, 0.2);
    const double g = z.squaredNorm();
    REQUIRE(g < 0.5);
    CHECK(w.value(z) == doctest::Approx(g).epsilon(1e-12));
    CHECK(w.g(z) == doctest::Approx(g).epsilon(1e-12));

    // the saturation plateau caps the bump at exactly one (M = 0 means no
    // exponential damping, the degenerate corner of the construction)
    CVec far(n);
    far << Complex(2.0, 0.0), Complex(0.0, 2.0);
    CHECK(w.value(far) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("witness derivatives agree with finite differences") {
    const int n = 2;
    const double R = 2.0;
    PshWitness w(CVec::Zero(n), RVec::Ones(n), quadratic_phi(n, R), /*M=*/3.0,
                 /*alpha=*/1.0, /*floor=*/0.5);

    CVec z(n);
    z << Complex(0.25, -0.15), Complex(0.1, 0.2);
    const DerivativeBundle b = w.derivatives(z);
    const DerivativeBundle fd = finite_difference_bundle(
        [&](const CVec& y) { return w.value(y); }, z);
    CHECK(b.value == doctest::Approx(w.value(z)).epsilon(1e-12));
    CHECK((b.grad - fd.grad).norm() < 1e-7);
    CHECK((b.hermitian - fd.hermitian).norm() < 1e-6);

    // log-space Levi form against differences of log u
    CVec Y(n);
    Y << Complex(0.8, 0.1), Complex(-0.3, 0.5);
    const DerivativeBundle logfd = finite_difference_bundle(
        [&](const CVec& y) { return std::log(w.value(y)); }, z);
    const double expected = (Y.transpose() * logfd.hermitian * Y.conjugate())(0, 0).real();
    CHECK(w.log_levi(z, Y) == doctest::Approx(expected).epsilon(1e-4));

    CHECK_THROWS_AS(w.log_levi(CVec::Zero(n), Y), ArgumentError);
}

TEST_CASE("center Levi form matches a finite-difference Hessian") {
    const int n = 2;
    const double R = 2.0;
    PshWitness w(CVec::Zero(n), RVec::Ones(n), quadratic_phi(n, R), /*M=*/2.0,
                 /*alpha=*/1.0, /*floor=*/0.5);

    const DerivativeBundle fd = finite_difference_bundle(
        [&](const CVec& y) { return w.value(y); }, CVec::Zero(n), 1e-4);
    CVec X(n);
    X << Complex(1.0, 0.0), Complex(0.5, -0.5);
    const double direct = (X.transpose() * fd.hermitian * X.conjugate())(0, 0).real();
    CHECK(w.center_levi(X) == doctest::Approx(direct).epsilon(1e-5));
    // closed form: exp(M (phi(0) - 1)) = exp(-2 M) for phi = |z|^2/R^2 - 1
    CHECK(w.center_levi(X) ==
          doctest::Approx(std::exp(-2.0 * 2.0) * X.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("builder certifies the phi contract and sizes M") {
    const int n = 2;
    CVec center = CVec::Zero(n);
    RVec beta(n);
    beta << 0.5, 0.25;
    const double R = 1.0;
    const double floor = 0.25 * 0.25 / (R * R);  // min_j beta_j^2 / R^2
    const double alpha = cutoffs::peak_alpha();

    PshWitness w = build_log_psh_witness(center, beta, quadratic_phi(n, R),
                                         alpha, floor);
    CHECK(w.M() == doctest::Approx(std::ceil(1.25 * alpha / floor)));
    CHECK(w.hessian_floor() == doctest::Approx(floor));

    CVec X(n);
    X << Complex(1.0, 0.0), Complex(0.0, 1.0);
    const double aniso = 1.0 / (0.5 * 0.5) + 1.0 / (0.25 * 0.25);
    CHECK(w.center_levi(X) ==
          doctest::Approx(std::exp(-w.M()) * aniso).epsilon(1e-12));

    // a floor the quadratic phi cannot honor is refused
    CHECK_THROWS_AS(build_log_psh_witness(center, beta, quadratic_phi(n, R),
                                          alpha, 10.0 * floor),
                    ArgumentError);
    // so is an unbounded phi (|phi| > 1 inside the polydisc)
    CHECK_THROWS_AS(build_log_psh_witness(center, beta, quadratic_phi(n, 0.05),
                                          alpha, floor),
                    ArgumentError);

    // constructor-level validation
    RVec bad = beta;
    bad(1) = -0.1;
    CHECK_THROWS_AS(PshWitness(center, bad, quadratic_phi(n, R), 1.0, 1.0, 1.0),
                    ArgumentError);
}

TEST_CASE("domain witness centers anywhere inside a catalog domain") {
    DomainModel ball = catalog_domain("ball", 2);
    CVec c(2);
    c << Complex(0.2, 0.1), Complex(-0.3, 0.0);
    PshWitness w = domain_witness(ball, c);
    CHECK((w.center() - c).norm() < 1e-14);
    CHECK(w.M() >= 1.0);

    // radii scale with the boundary distance and fit inside the domain
    const double dist = distance_to_boundary(ball, c);
    for (int j = 0; j < 2; ++j)
        CHECK(w.beta()(j) == doctest::Approx(0.9 * dist / std::sqrt(2.0)).epsilon(1e-9));

    // the witness value stays in [0, 1) on domain samples
    CHECK(w.value(c) == 0.0);
    CVec z(2);
    z << Complex(0.25, 0.12), Complex(-0.28, 0.03);
    const double v = w.value(z);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);

    CHECK_THROWS_AS(domain_witness(ball, c, 1.5), ArgumentError);
}
