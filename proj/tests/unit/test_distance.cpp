#include <doctest.h>

#include <pcvx/distance.hpp>

#include <cmath>

using namespace pcvx;

namespace {

CVec cvec2(Complex a, Complex b) {
    CVec z(2);
    z << a, b;
    return z;
}

}  // namespace

TEST_CASE("closed-form boundary distances on the catalog") {
    DomainModel ball = catalog_domain("ball", 2);
    CHECK(distance_to_boundary(ball, cvec2(Complex(0.3, 0.4), 0)) ==
          doctest::Approx(0.5).epsilon(1e-12));

    DomainModel bidisc = catalog_domain("polydisc", 2);
    CHECK(distance_to_boundary(bidisc, cvec2(0.7, Complex(0, -0.2))) ==
          doctest::Approx(0.3).epsilon(1e-12));

    DomainModel prod = catalog_domain("product_disc_ball", 3);
    CVec z(3);
    z << Complex(0.5, 0), Complex(0.6, 0), Complex(0, 0.3);
    // ball factor: 1 - sqrt(0.36 + 0.09) ~ 0.329 < disc factor 0.5
    CHECK(distance_to_boundary(prod, z) ==
          doctest::Approx(1.0 - std::sqrt(0.45)).epsilon(1e-12));
}

TEST_CASE("projection-based distance agrees with geometry on the ellipsoid") {
    DomainModel e = catalog_domain("ellipsoid", 2, {2.0, 1.0});
    // from (0.3, 0) the nearest boundary point lies on the same real axis
    const double expected = 1.0 / std::sqrt(2.0) - 0.3;
    CHECK(distance_to_boundary(e, cvec2(0.3, 0)) == doctest::Approx(expected).epsilon(1e-8));

    ProjectionResult pr = project_to_boundary(e, cvec2(0.3, 0));
    CHECK(pr.converged);
    CHECK(std::abs(e.rho(pr.foot)) < 1e-10);
    CHECK(pr.distance == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("projection works from outside the closure as well") {
    DomainModel ball = catalog_domain("ball", 2);
    ProjectionResult pr = project_to_boundary(ball, cvec2(2.0, 0));
    CHECK(pr.converged);
    CHECK(pr.foot.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pr.distance == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("signed distance changes sign across the boundary") {
    DomainModel ball = catalog_domain("ball", 2);
    CHECK(signed_distance(ball, cvec2(0.4, 0)) == doctest::Approx(-0.6).epsilon(1e-10));
    CHECK(signed_distance(ball, cvec2(1.5, 0)) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("distance_to_boundary rejects exterior points") {
    DomainModel ball = catalog_domain("ball", 2);
    CHECK_THROWS_AS(distance_to_boundary(ball, cvec2(1.2, 0.4)), ArgumentError);
}

TEST_CASE("outward normals point along the defining gradient") {
    DomainModel ball = catalog_domain("ball", 2);
    const CVec nu = outward_normal(ball, cvec2(0.9, 0));
    CHECK(nu.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(nu(0) - Complex(1, 0)) < 1e-10);

    // walking inward along -nu increases the distance linearly
    DomainModel bidisc = catalog_domain("polydisc", 2);
    const CVec p = cvec2(1, 0.3);
    const CVec face_normal = outward_normal(bidisc, p);
    CHECK(std::abs(face_normal(0) - Complex(1, 0)) < 1e-10);
    CHECK(std::abs(face_normal(1)) < 1e-10);
    CHECK(distance_to_boundary(bidisc, p - 0.25 * face_normal) ==
          doctest::Approx(0.25).epsilon(1e-12));
}
