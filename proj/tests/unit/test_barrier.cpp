#include <doctest.h>

#include <pcvx/barrier.hpp>

#include <cmath>

using namespace pcvx;

namespace {

NormalizedChart sp_model() {
    RVec lambda(1);
    lambda << 0.5;
    return NormalizedChart::model(2, 0, lambda);
}

NormalizedChart flat_model() {
    return NormalizedChart::model(2, 1, RVec(0));
}

NormalizedChart mixed_model() {
    RVec lambda(1);
    lambda << 0.5;
    return NormalizedChart::model(3, 1, lambda);
}

}  // namespace

TEST_CASE("direction weight splits by block with the right powers") {
    const double delta = 1e-2;
    CVec X = CVec::Zero(3);
    X(0) = Complex(1.0, 0.0);
    CHECK(omega_weight(X, delta, 1) == doctest::Approx(1e4).epsilon(1e-12));
    X.setZero();
    X(1) = Complex(0.0, 1.0);
    CHECK(omega_weight(X, delta, 1) == doctest::Approx(1e2).epsilon(1e-12));
    X.setZero();
    X(2) = Complex(1.0, 0.0);
    CHECK(omega_weight(X, delta, 1) == doctest::Approx(1.0).epsilon(1e-12));
    X(0) = Complex(0.0, 2.0);
    X(1) = Complex(3.0, 0.0);
    CHECK(omega_weight(X, delta, 1) ==
          doctest::Approx(4.0 * 1e4 + 9.0 * 1e2 + 1.0).epsilon(1e-12));
}

TEST_CASE("frequency boxes size their half-widths anisotropically") {
    const double delta = 4e-2;
    FrequencyBox P = FrequencyBox::P(delta, 0.5, 3, 1);
    // half-widths: 0.5*delta, 0.5*sqrt(delta), 0.5
    CVec inside = CVec::Zero(3);
    inside(0) = Complex(0.4 * delta, 0.0);
    inside(1) = Complex(0.4 * std::sqrt(delta), 0.0);
    inside(2) = Complex(0.0, 0.45);
    CHECK(P.contains(inside));
    CVec outside = inside;
    outside(1) = Complex(0.6 * std::sqrt(delta), 0.0);
    CHECK_FALSE(P.contains(outside));

    FrequencyBox Q = FrequencyBox::Q(delta, 0.3, 3, 1);
    CHECK(Q.center0().real() == doctest::Approx(-0.3 * delta).epsilon(1e-12));
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const CVec s = Q.sample(rng);
        CHECK(Q.contains(s));
        CHECK(s(0).real() < 0.0);  // Q sits strictly inside the domain side
    }
}

TEST_CASE("barrier composition evaluates its own derivatives") {
    BarrierParams params;
    params.a = 0.25;
    params.b = 0.5;
    params.M = 8.0;
    params.C1 = 2.0;
    params.C2 = 0.05;
    BarrierFunction bf(sp_model(), 1e-2, params);

    Rng rng(42);
    for (int i = 0; i < 5; ++i) {
        const CVec zeta = bf.sample_patch(rng);
        REQUIRE(bf.chart().rho(zeta) < 0.0);
        const DerivativeBundle b = bf.derivatives(zeta);
        CHECK(b.value == doctest::Approx(bf.value(zeta)).epsilon(1e-12));
        const DerivativeBundle fd = finite_difference_bundle(
            [&](const CVec& w) { return bf.value(w); }, zeta, 1e-5);
        const double scale = 1.0 + b.grad.norm();
        CHECK((b.grad - fd.grad).norm() < 1e-5 * scale);
        const double hscale = 1.0 + b.hermitian.norm();
        CHECK((b.hermitian - fd.hermitian).norm() < 2e-4 * hscale);

        CVec Y(2);
        Y << Complex(0.3, -0.4), Complex(0.8, 0.1);
        const double direct =
            (Y.transpose() * b.hermitian * Y.conjugate())(0, 0).real();
        CHECK(bf.levi(zeta, Y) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("certified barriers exist on the model charts") {
    for (const NormalizedChart& chart : {sp_model(), flat_model(), mixed_model()}) {
        for (double delta : {1e-1, 1e-2}) {
            BarrierFunction bf = build_barrier(chart, delta);
            BarrierReport report = verify_barrier(bf, 2000, 400, 40);
            CAPTURE(chart.rank);
            CAPTURE(delta);
            CHECK(report.range_ok);
            CHECK(report.min_value >= -1e-12);
            CHECK(report.max_value <= 1.0 + 1e-12);
            CHECK(report.psd_ok);
            CHECK(report.worst_eig_scaled >= -1e-9);
            CHECK(report.lower_bound_ok);
            CHECK(report.c0 > 0.0);
            CHECK(report.region_samples >= 2000);
            CHECK(report.probe_samples >= 400);
        }
    }
}

TEST_CASE("hinted rebuilds keep the certified constants") {
    NormalizedChart chart = sp_model();
    BarrierFunction first = build_barrier(chart, 1e-1);
    const BarrierParams hint = first.params();
    BarrierFunction second = build_barrier(chart, 1e-2, 1000, &hint);
    CHECK(second.params().a == doctest::Approx(hint.a));
    CHECK(second.params().b == doctest::Approx(hint.b));
    CHECK(second.params().M == doctest::Approx(hint.M));
}

TEST_CASE("derivative growth tracks the anisotropic prediction") {
    NormalizedChart chart = sp_model();
    std::vector<BarrierFunction> sweep;
    BarrierParams hint{};
    bool have_hint = false;
    for (double delta : {1e-1, 3.16e-2, 1e-2, 3.16e-3, 1e-3}) {
        BarrierFunction bf =
            build_barrier(chart, delta, 1000, have_hint ? &hint : nullptr);
        hint = bf.params();
        have_hint = true;
        sweep.push_back(bf);
    }
    const std::vector<DerivativeScalingFit> fits =
        barrier_derivative_scaling(sweep, 200);
    REQUIRE(!fits.empty());
    for (const DerivativeScalingFit& fit : fits) {
        CAPTURE(fit.label);
        REQUIRE(fit.values.size() == sweep.size());
        const double tol = 0.1 * std::max(1.0, std::abs(fit.expected));
        CHECK(std::abs(fit.slope - fit.expected) <= tol);
    }
}

TEST_CASE("verification flags a broken barrier") {
    // params chosen out of normalization: C1 too small leaves values above 1
    BarrierParams bad;
    bad.a = 0.25;
    bad.b = 0.5;
    bad.M = 8.0;
    bad.C1 = 1e-3;
    bad.C2 = 0.05;
    BarrierFunction bf(sp_model(), 1e-2, bad);
    BarrierReport report = verify_barrier(bf, 500, 100, 20);
    CHECK_FALSE(report.range_ok);
    CHECK(report.max_value > 1.0);

    nlohmann::json j = barrier_report_to_json(report);
    CHECK(j.at("range_ok").get<bool>() == false);
    CHECK(j.at("c0").is_number());
}
