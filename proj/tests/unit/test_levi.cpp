#include <doctest.h>

#include <pcvx/levi.hpp>

#include <cmath>

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

}  // namespace

TEST_CASE("ball boundary has full Levi rank with unit eigenvalues") {
    DomainModel ball = catalog_domain("ball", 3);
    LeviData ld = levi_rank(ball, cvec3(1, 0, 0));
    CHECK(ld.rank == 2);
    CHECK(ld.null_basis.cols() == 0);
    CHECK(ld.eigenvalues.size() == 2);
    CHECK(ld.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ld.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-10));
    // gradient of |z|^2 - 1 at (1,0,0) is conj(z) = e_1
    CHECK(std::abs(ld.gradient(0) - Complex(1, 0)) < 1e-10);
    // tangential vectors pair to zero with the gradient
    for (int c = 0; c < ld.tangential_basis.cols(); ++c)
        CHECK(std::abs(holomorphic_pairing(ld.gradient, ld.tangential_basis.col(c))) < 1e-10);
}

TEST_CASE("polydisc faces are Levi flat") {
    DomainModel bidisc = catalog_domain("polydisc", 2);
    LeviData ld = levi_rank(bidisc, cvec2(1, 0.3));
    CHECK(ld.rank == 0);
    REQUIRE(ld.null_basis.cols() == 1);
    // the null direction is the face coordinate z_2 (up to phase)
    CHECK(std::abs(ld.null_basis.col(0)(1)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ld.positive_basis.cols() == 0);
}

TEST_CASE("disc x ball boundary splits into one positive and one null direction") {
    DomainModel prod = catalog_domain("product_disc_ball", 3);
    LeviData ld = levi_rank(prod, cvec3(0.3, 1, 0));
    CHECK(ld.rank == 1);
    REQUIRE(ld.null_basis.cols() == 1);
    REQUIRE(ld.positive_basis.cols() == 1);
    // the disc factor is the foliation direction on this face
    CHECK(std::abs(ld.null_basis.col(0)(0)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(ld.positive_basis.col(0)(2)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ellipsoid Levi eigenvalue at the long-axis pole") {
    DomainModel e = catalog_domain("ellipsoid", 2, {2.0, 1.0});
    LeviData ld = levi_rank(e, cvec2(1.0 / std::sqrt(2.0), 0));
    CHECK(ld.rank == 1);
    // tangent space is spanned by e_2 and the Levi form there is
    // d^2(|z_2|^2)/dz_2 dzbar_2 = 1
    CHECK(ld.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Levi matrices are Hermitian and the form is conjugate-symmetric") {
    DomainModel e = catalog_domain("ellipsoid", 3, {2.0, 1.0, 0.5});
    CVec p = cvec3(0.3, 0.4, 0.2);
    LeviData ld = levi_rank(e, p);
    CHECK((ld.levi_matrix - ld.levi_matrix.adjoint()).norm() < 1e-12);

    const CVec X = cvec3(Complex(0.3, 0.1), Complex(-0.2, 0.4), Complex(0.1, -0.5));
    const CVec Y = cvec3(Complex(-0.1, 0.2), Complex(0.5, 0.0), Complex(0.2, 0.3));
    const Complex lxy = levi_form(e, ld.base_point, X, Y);
    const Complex lyx = levi_form(e, ld.base_point, Y, X);
    CHECK(std::abs(lxy - std::conj(lyx)) < 1e-12);
    // diagonal entries real and nonnegative for this convex domain
    CHECK(levi_form(e, ld.base_point, X, X).real() >= 0.0);
    CHECK(std::abs(levi_form(e, ld.base_point, X, X).imag()) < 1e-12);
}

TEST_CASE("indefinite tangential Hessians are refused") {
    // rho = Re z_2 + |z_1|^4 - |z_1|^2 has Levi eigenvalue -1 along e_1 at 0
    std::vector<MonomialTerm> terms = {{{0, 1}, {0, 0}, 0.5},
                                       {{0, 0}, {0, 1}, 0.5},
                                       {{2, 0}, {2, 0}, 1.0},
                                       {{1, 0}, {1, 0}, -1.0}};
    CVec anchor(2);
    anchor << Complex(0, 0), Complex(-0.5, 0);
    DomainModel d = polynomial_domain(2, terms, RVec::Ones(2), anchor);
    CHECK_THROWS_AS(levi_rank(d, CVec::Zero(2)), StructureError);
}

TEST_CASE("levi_rank projects interior probes to the boundary first") {
    DomainModel ball = catalog_domain("ball", 2);
    LeviData ld = levi_rank(ball, cvec2(0.9, 0));
    CHECK(ld.base_point.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ld.rank == 1);
}
