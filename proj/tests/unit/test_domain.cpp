#include <doctest.h>

#include <pcvx/domain.hpp>

#include <cmath>
#include <numbers>

using namespace pcvx;

namespace {

CVec cvec2(Complex a, Complex b) {
    CVec z(2);
    z << a, b;
    return z;
}

CVec cvec3(Complex a, Complex b, Complex c) {
    CVec z(3);
    z << a, b, c;
    return z;
}

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("catalog ball: defining function, membership, closure bounds") {
    DomainModel ball = catalog_domain("ball", 2);
    CHECK(ball.dimension() == 2);
    CHECK(ball.rho(cvec2(0, 0)) == doctest::Approx(-1.0));
    CHECK(ball.rho(cvec2(1, 0)) == doctest::Approx(0.0));
    CHECK(ball.contains(cvec2(0.5, 0.5)));
    CHECK_FALSE(ball.contains(cvec2(0.8, 0.7)));
    CHECK(ball.coord_radius()(0) == doctest::Approx(1.0));
    CHECK(ball.circumradius() >= 1.0);
    CHECK(ball.contains(ball.interior_anchor()));
}

TEST_CASE("catalog kernels at the center match the closed forms") {
    const CVec zero1 = CVec::Zero(1);
    const CVec zero2 = CVec::Zero(2);
    const CVec zero3 = CVec::Zero(3);
    CHECK(catalog_domain("polydisc", 1).kernel_oracle(zero1) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-12));
    CHECK(catalog_domain("polydisc", 2).kernel_oracle(zero2) ==
          doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-12));
    CHECK(catalog_domain("ball", 2).kernel_oracle(zero2) ==
          doctest::Approx(2.0 / (kPi * kPi)).epsilon(1e-12));
    // disc x ball factors: 1/pi times 2/pi^2
    CHECK(catalog_domain("product_disc_ball", 3).kernel_oracle(zero3) ==
          doctest::Approx(2.0 / (kPi * kPi * kPi)).epsilon(1e-12));
}

TEST_CASE("catalog ellipsoid: parameters shape the boundary, no kernel oracle") {
    DomainModel e = catalog_domain("ellipsoid", 2, {2.0, 1.0});
    CHECK(e.rho(cvec2(1.0 / std::sqrt(2.0), 0)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(e.rho(cvec2(0, 1)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_FALSE(e.has_kernel_oracle());
    CHECK(e.coord_radius()(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(catalog_domain("ellipsoid", 2, {1.0, -2.0}), ArgumentError);
    CHECK_THROWS_AS(catalog_domain("banana", 2), ArgumentError);
}

TEST_CASE("analytic derivative oracles agree with finite differences") {
    for (const char* name : {"ball", "polydisc", "ellipsoid"}) {
        DomainModel d = name == std::string("ellipsoid")
                            ? catalog_domain(name, 2, {2.0, 1.0})
                            : catalog_domain(name, 2);
        const CVec z = cvec2(Complex(0.31, -0.12), Complex(-0.22, 0.17));
        const DerivativeBundle a = d.derivatives(z);
        const DerivativeBundle fd =
            finite_difference_bundle([&d](const CVec& w) { return d.rho(w); }, z);
        CHECK(a.value == doctest::Approx(fd.value).epsilon(1e-9));
        CHECK((a.grad - fd.grad).norm() < 1e-6);
        CHECK((a.hermitian - fd.hermitian).norm() < 1e-5);
        CHECK((a.holomorphic - fd.holomorphic).norm() < 1e-5);
    }
}

TEST_CASE("polynomial domains demand Hermitian-symmetric coefficient tables") {
    // |z1|^2 - 1 is fine
    std::vector<MonomialTerm> ok = {{{1, 0}, {1, 0}, 1.0}, {{0, 0}, {0, 0}, -1.0}};
    DomainModel d = polynomial_domain(2, ok, RVec::Ones(2), CVec::Zero(2));
    CHECK(d.rho(cvec2(0.5, 0.9)) == doctest::Approx(-0.75));

    // z1 zbar2 alone is not Hermitian-symmetric
    std::vector<MonomialTerm> bad = {{{1, 0}, {0, 1}, 1.0}, {{0, 0}, {0, 0}, -1.0}};
    CHECK_THROWS_AS(polynomial_domain(2, bad, RVec::Ones(2), CVec::Zero(2)), ArgumentError);
}

TEST_CASE("polynomial domain derivatives match finite differences") {
    // rho = |z1|^4 + |z2|^2 + Re(z1 zbar2) - 0.8
    std::vector<MonomialTerm> terms = {{{2, 0}, {2, 0}, 1.0},  {{0, 1}, {0, 1}, 1.0},
                                       {{1, 0}, {0, 1}, 0.5},  {{0, 1}, {1, 0}, 0.5},
                                       {{0, 0}, {0, 0}, -0.8}};
    DomainModel d = polynomial_domain(2, terms, RVec::Ones(2), CVec::Zero(2));
    const CVec z = cvec2(Complex(0.21, 0.33), Complex(-0.14, 0.05));
    const DerivativeBundle a = d.derivatives(z);
    const DerivativeBundle fd =
        finite_difference_bundle([&d](const CVec& w) { return d.rho(w); }, z);
    CHECK(a.value == doctest::Approx(fd.value).epsilon(1e-10));
    CHECK((a.grad - fd.grad).norm() < 1e-7);
    CHECK((a.hermitian - fd.hermitian).norm() < 1e-5);
    CHECK((a.holomorphic - fd.holomorphic).norm() < 1e-5);
}

TEST_CASE("affine images transport the kernel with the Jacobian factor") {
    DomainModel disc = catalog_domain("polydisc", 1);
    const Complex a(0.7, 0.0);
    CMat A(1, 1);
    A << a;
    CVec b(1);
    b << Complex(0.1, -0.05);
    DomainModel image = transformed_domain(disc, A, b);

    CVec z(1);
    z << Complex(0.2, 0.3);
    const CVec w = A * z + b;
    CHECK(image.contains(w));
    // K_image(Az + b) = K_disc(z) / |det A|^2
    CHECK(image.kernel_oracle(w) ==
          doctest::Approx(disc.kernel_oracle(z) / std::norm(a)).epsilon(1e-12));
    // the closed-form distance only survives rigid maps
    CHECK_FALSE(image.has_distance_oracle());
    CMat phase(1, 1);
    phase << Complex(std::cos(0.4), std::sin(0.4));
    DomainModel spun = transformed_domain(disc, phase, CVec::Zero(1));
    CVec q(1);
    q << Complex(0.25, 0.0);
    CHECK(spun.distance_oracle(phase * q) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("unitary images of the ball keep the kernel oracle invariant") {
    DomainModel ball = catalog_domain("ball", 2);
    CMat U(2, 2);
    const double c = std::cos(0.7), s = std::sin(0.7);
    U << Complex(c, 0), Complex(-s, 0) * Complex(std::cos(0.3), std::sin(0.3)),
        Complex(s, 0), Complex(c, 0) * Complex(std::cos(0.3), std::sin(0.3));
    REQUIRE((U.adjoint() * U - CMat::Identity(2, 2)).norm() < 1e-14);
    DomainModel rotated = transformed_domain(ball, U, CVec::Zero(2));
    const CVec z = cvec2(Complex(0.4, 0.1), Complex(-0.2, 0.3));
    CHECK(rotated.kernel_oracle(U * z) ==
          doctest::Approx(ball.kernel_oracle(z)).epsilon(1e-12));
    CHECK(rotated.metric_oracle(U * z, U * cvec2(1, 0)) ==
          doctest::Approx(ball.metric_oracle(z, cvec2(1, 0))).epsilon(1e-12));
}

TEST_CASE("domain descriptions survive a JSON round trip") {
    DomainModel ball = catalog_domain("ball", 3);
    DomainModel back = domain_from_json(domain_to_json(ball));
    CHECK(back.name() == "ball");
    CHECK(back.dimension() == 3);
    const CVec z = cvec3(Complex(0.2, 0.1), Complex(0.0, -0.3), Complex(0.4, 0.0));
    CHECK(back.rho(z) == doctest::Approx(ball.rho(z)).epsilon(1e-14));

    std::vector<MonomialTerm> terms = {{{1, 0}, {1, 0}, 2.0},
                                       {{0, 1}, {0, 1}, 1.0},
                                       {{0, 0}, {0, 0}, -1.0}};
    DomainModel poly = polynomial_domain(2, terms, RVec::Ones(2), CVec::Zero(2));
    DomainModel poly_back = domain_from_json(domain_to_json(poly));
    const CVec w = cvec2(Complex(0.3, 0.2), Complex(-0.1, 0.4));
    CHECK(poly_back.rho(w) == doctest::Approx(poly.rho(w)).epsilon(1e-14));
}

TEST_CASE("dimension mismatches are rejected up front") {
    DomainModel ball = catalog_domain("ball", 2);
    CHECK_THROWS_AS(ball.rho(CVec::Zero(3)), ArgumentError);
}
