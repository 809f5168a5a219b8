#include <doctest.h>

#include <pcvx/cutoffs.hpp>

#include <cmath>
#include <initializer_list>

using namespace pcvx::cutoffs;

namespace {

// central finite difference of a scalar function
template <typename F>
double fd1(F f, double t, double h = 1e-5) {
    return (f(t + h) - f(t - h)) / (2 * h);
}

}  // namespace

TEST_CASE("smoothstep interpolates with three flat derivatives at both ends") {
    CHECK(smoothstep(-0.5) == 0.0);
    CHECK(smoothstep(0.0) == 0.0);
    CHECK(smoothstep(1.0) == 1.0);
    CHECK(smoothstep(2.0) == 1.0);
    CHECK(smoothstep(0.5) == doctest::Approx(0.5).epsilon(1e-12));

    for (double t : {0.0, 1.0}) {
        CHECK(smoothstep_d1(t) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(smoothstep_d2(t) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(smoothstep_d3(t) == doctest::Approx(0.0).epsilon(1e-12));
    }
    // monotone on [0,1]
    for (int i = 0; i <= 20; ++i) CHECK(smoothstep_d1(i / 20.0) >= 0.0);
    // derivative oracles match finite differences mid-interval
    CHECK(smoothstep_d1(0.37) == doctest::Approx(fd1(smoothstep, 0.37)).epsilon(1e-8));
    CHECK(smoothstep_d2(0.37) == doctest::Approx(fd1(smoothstep_d1, 0.37)).epsilon(1e-8));
    CHECK(smoothstep_d3(0.37) == doctest::Approx(fd1(smoothstep_d2, 0.37)).epsilon(1e-7));
}

TEST_CASE("smoothstep integral is smooth and continues linearly") {
    CHECK(smoothstep_integral(0.0) == doctest::Approx(0.0));
    // beyond 1 the profile is constant 1, so the integral grows linearly
    const double at1 = smoothstep_integral(1.0);
    CHECK(smoothstep_integral(2.5) == doctest::Approx(at1 + 1.5).epsilon(1e-12));
    CHECK(fd1(smoothstep_integral, 0.6) == doctest::Approx(smoothstep(0.6)).epsilon(1e-8));
}

TEST_CASE("plateau cutoff chi1 is 1 then descends to 0") {
    CHECK(chi1(0.0) == 1.0);
    CHECK(chi1(0.5) == 1.0);
    CHECK(chi1(1.0) == 0.0);
    CHECK(chi1(3.0) == 0.0);
    CHECK(chi1(0.75) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(chi1_d1(0.6) == doctest::Approx(fd1(chi1, 0.6)).epsilon(1e-8));
    CHECK(chi1_d2(0.6) == doctest::Approx(fd1(chi1_d1, 0.6)).epsilon(1e-8));
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9, 1.1}) CHECK(chi1_d1(t) <= 1e-15);
}

TEST_CASE("growth profile chi2 is convex and flat below one half") {
    CHECK(chi2(0.2) == 0.0);
    CHECK(chi2(0.5) == 0.0);
    CHECK(chi2(1.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chi2_d1(0.9) == doctest::Approx(fd1(chi2, 0.9)).epsilon(1e-8));
    CHECK(chi2_d2(0.9) == doctest::Approx(fd1(chi2_d1, 0.9)).epsilon(1e-8));
    for (double t : {0.1, 0.6, 1.0, 2.0, 5.0}) {
        CHECK(chi2_d1(t) >= 0.0);
        CHECK(chi2_d2(t) >= 0.0);
    }
}

TEST_CASE("saturation profile: identity, taper, plateau, concave throughout") {
    CHECK(peak(0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(peak_d1(0.3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(peak_d1(2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(peak(2.0) == doctest::Approx(peak(1.5)).epsilon(1e-14));
    CHECK(peak_d1(0.9) == doctest::Approx(fd1(peak, 0.9)).epsilon(1e-8));
    CHECK(peak_d2(0.9) == doctest::Approx(fd1(peak_d1, 0.9)).epsilon(1e-8));
    for (int i = 1; i <= 40; ++i) {
        const double t = i * 0.05;
        CHECK(peak_d1(t) >= -1e-15);   // increasing
        CHECK(peak_d2(t) <= 1e-15);    // concave
        CHECK(peak(t) > 0.0);
    }
}

TEST_CASE("certified saturation defect bounds the log-profile curvature") {
    const double alpha = peak_alpha();
    CHECK(alpha > 0.0);
    CHECK(alpha < 10.0);
    // kappa(t) = (log peak)'(t) + t (log peak)''(t) >= -alpha everywhere,
    // and vanishes identically off the taper interval.
    auto kappa = [](double t) {
        const double v = peak(t), d1 = peak_d1(t), d2 = peak_d2(t);
        const double l1 = d1 / v;
        const double l2 = d2 / v - l1 * l1;
        return l1 + t * l2;
    };
    for (int i = 1; i <= 300; ++i) {
        const double t = i * 0.01;
        CHECK(kappa(t) >= -alpha - 1e-9);
    }
    CHECK(kappa(0.25) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(kappa(2.5) == doctest::Approx(0.0).epsilon(1e-12));
}
