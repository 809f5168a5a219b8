#include <doctest.h>

#include <pcvx/distance.hpp>
#include <pcvx/fitting.hpp>
#include <pcvx/kobayashi.hpp>

#include <cmath>
#include <random>

using namespace pcvx;

namespace {

CVec unit2(Complex a, Complex b) {
    CVec v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("extremal discs recover the classical center values") {
    DomainModel disc = catalog_domain("polydisc", 1);
    CVec z0 = CVec::Zero(1);
    CVec e(1);
    e << Complex(1.0, 0.0);
    CHECK(kobayashi_upper(disc, z0, e) == doctest::Approx(1.0).epsilon(1e-6));

    DomainModel ball = catalog_domain("ball", 2);
    CHECK(kobayashi_upper(ball, CVec::Zero(2), unit2(1.0, 0.0)) ==
          doctest::Approx(1.0).epsilon(1e-6));

    // bidisc at the center along the diagonal: the product metric is the max
    // of the factor metrics, so the linear disc t -> (t, t) is extremal
    DomainModel bidisc = catalog_domain("polydisc", 2);
    CHECK(kobayashi_upper(bidisc, CVec::Zero(2), unit2(1.0, 1.0)) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("disc data is coherent and richer families never hurt") {
    DomainModel ball = catalog_domain("ball", 2);
    CVec z = unit2(Complex(0.2, 0.1), Complex(-0.1, 0.0));
    CVec X = unit2(Complex(0.7, -0.2), Complex(0.4, 0.3));

    DiscFamily lin;
    DiscBound b1 = kobayashi_upper_disc(ball, z, X, lin);
    CHECK(b1.speed > 0.0);
    CHECK(b1.upper == doctest::Approx(X.norm() / b1.speed).epsilon(1e-12));
    REQUIRE(b1.coefficients.cols() == 1);
    // first coefficient = speed * unit direction
    CHECK((b1.coefficients.col(0) - b1.speed * X / X.norm()).norm() < 1e-9);

    DiscFamily cubic;
    cubic.degree = 3;
    cubic.optimizer_budget = 150;
    DiscBound b3 = kobayashi_upper_disc(ball, z, X, cubic);
    CHECK(b3.upper <= b1.upper * (1.0 + 1e-9));  // zero-seeded search
    REQUIRE(b3.coefficients.cols() == 3);
    CHECK((b3.coefficients.col(0).norm()) == doctest::Approx(b3.speed).epsilon(1e-9));
}

TEST_CASE("degree-3 discs at the ball center stay at the exact value") {
    DomainModel ball = catalog_domain("ball", 2);
    DiscFamily cubic;
    cubic.degree = 3;
    cubic.optimizer_budget = 200;
    const double u = kobayashi_upper_disc(ball, CVec::Zero(2), unit2(1.0, 0.0), cubic).upper;
    CHECK(u <= 1.0 + 1e-4);
    CHECK(u >= 1.0 - 1e-9);  // the identity disc is already extremal
}

TEST_CASE("upper bound scales exactly like the direction") {
    DomainModel ball = catalog_domain("ball", 2);
    CVec z = unit2(Complex(0.25, -0.05), Complex(0.1, 0.15));
    CVec X = unit2(Complex(0.3, 0.4), Complex(-0.5, 0.2));
    const Complex c(0.8, -1.7);

    const double base = kobayashi_upper(ball, z, X);
    CHECK(kobayashi_upper(ball, z, c * X) ==
          doctest::Approx(std::abs(c) * base).epsilon(1e-9));

    DiscFamily quad;
    quad.degree = 2;
    quad.optimizer_budget = 120;
    const double q = kobayashi_upper_disc(ball, z, X, quad).upper;
    const double qc = kobayashi_upper_disc(ball, z, c * X, quad).upper;
    CHECK(qc == doctest::Approx(std::abs(c) * q).epsilon(1e-6));
}

TEST_CASE("inclusion makes the certified bound monotone") {
    DomainModel ball = catalog_domain("ball", 2);
    DomainModel bidisc = catalog_domain("polydisc", 2);
    Rng rng(0x2b2b);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int i = 0; i < 10; ++i) {
        CVec z = unit2(Complex(u(rng), u(rng)), Complex(u(rng), u(rng)));
        if (!(ball.rho(z) < 0.0)) continue;
        CVec X = unit2(Complex(u(rng), u(rng)), Complex(u(rng), u(rng)));
        if (X.norm() < 1e-3) continue;
        // ball inside bidisc: smaller domain, larger metric
        CHECK(kobayashi_upper(ball, z, X) >=
              kobayashi_upper(bidisc, z, X) * (1.0 - 1e-9));
    }
}

TEST_CASE("witness lower bounds never cross the disc upper bounds") {
    Rng rng(0x5a3d);
    std::uniform_real_distribution<double> u(-0.45, 0.45);
    std::vector<DomainModel> domains;
    domains.push_back(catalog_domain("ball", 2));
    domains.push_back(catalog_domain("polydisc", 2));
    domains.push_back(catalog_domain("ellipsoid", 2, {2.0, 1.0}));

    int checked = 0;
    for (const DomainModel& dom : domains) {
        for (int i = 0; i < 12; ++i) {
            CVec z = unit2(Complex(u(rng), u(rng)), Complex(u(rng), u(rng)));
            if (!(dom.rho(z) < -0.05)) continue;
            CVec X = unit2(Complex(u(rng), u(rng)), Complex(u(rng), u(rng)));
            if (X.norm() < 1e-3) continue;
            const double lower = sibony_lower(dom, z, X);
            const double upper = kobayashi_upper(dom, z, X);
            CHECK(lower <= upper * (1.0 + 1e-9));
            CHECK(lower >= 0.0);
            ++checked;
        }
    }
    CHECK(checked >= 20);

    // witness centered elsewhere is rejected
    DomainModel ball = catalog_domain("ball", 2);
    CVec c = unit2(0.2, 0.0);
    PshWitness w = domain_witness(ball, c);
    CHECK_THROWS_AS(sibony_lower(ball, unit2(0.0, 0.1), unit2(1.0, 0.0), w),
                    ArgumentError);
}

TEST_CASE("comparability weight: closed forms on the catalog") {
    DomainModel bidisc = catalog_domain("polydisc", 2);

    // null direction on the flat face: both distance derivatives vanish
    CVec z = unit2(0.9, 0.3);
    CHECK(comparability_M(bidisc, z, unit2(0.0, 1.0)) ==
          doctest::Approx(0.0).epsilon(1e-8));

    // normal direction: the pairing term dominates at delta^-2 (stay below
    // delta ~ 3e-2 so the subleading terms cannot tilt the fitted slope)
    std::vector<double> deltas = geometric_deltas(1e-3, 3e-2, 10);
    std::vector<double> normal_vals, tangential_vals;
    DomainModel ball = catalog_domain("ball", 2);
    for (double d : deltas) {
        normal_vals.push_back(
            comparability_M(bidisc, unit2(1.0 - d, 0.3), unit2(1.0, 0.0)));
        tangential_vals.push_back(
            comparability_M(ball, unit2(1.0 - d, 0.0), unit2(0.0, 1.0)));
    }
    CHECK(fit_log_log(deltas, normal_vals).slope ==
          doctest::Approx(-2.0).epsilon(0.02));
    CHECK(fit_log_log(deltas, tangential_vals).slope ==
          doctest::Approx(-1.0).epsilon(0.02));

    // closed form against the finite-difference fallback on a cloned ball
    DomainModel clone = domain_from_function(
        2, [&ball](const CVec& w) { return ball.rho(w); }, ball.coord_radius(),
        CVec::Zero(2));
    for (double d : {0.3, 0.2}) {
        CVec p = unit2(1.0 - d, 0.1);
        CVec X = unit2(Complex(0.4, 0.3), Complex(-0.2, 0.6));
        const double exact = comparability_M(ball, p, X);
        const double fd = comparability_M(clone, p, X);
        CHECK(fd == doctest::Approx(exact).epsilon(1e-4));
    }

    // the distance function is singular at a ball-factor center
    CHECK_THROWS_AS(comparability_M(ball, CVec::Zero(2), unit2(1.0, 0.0)),
                    NumericalError);
    // outside points are rejected
    CHECK_THROWS_AS(comparability_M(ball, unit2(1.2, 0.0), unit2(1.0, 0.0)),
                    ArgumentError);
}

TEST_CASE("bad arguments are rejected early") {
    DomainModel ball = catalog_domain("ball", 2);
    CHECK_THROWS_AS(kobayashi_upper(ball, CVec::Zero(2), CVec::Zero(2)),
                    ArgumentError);
    CHECK_THROWS_AS(kobayashi_upper(ball, unit2(1.1, 0.0), unit2(1.0, 0.0)),
                    ArgumentError);
    DiscFamily bad;
    bad.degree = 0;
    CHECK_THROWS_AS(
        kobayashi_upper_disc(ball, CVec::Zero(2), unit2(1.0, 0.0), bad),
        ArgumentError);
}
