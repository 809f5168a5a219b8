// Microbenchmarks for the hot paths: kernel evaluation on each backend,
// Levi-rank analysis, barrier derivative assembly, and the analytic-disc
// upper bound.  Run with --benchmark_filter=... to focus on one group.

#include <pcvx/barrier.hpp>
#include <pcvx/bergman.hpp>
#include <pcvx/chart.hpp>
#include <pcvx/domain.hpp>
#include <pcvx/kobayashi.hpp>
#include <pcvx/levi.hpp>

#include <benchmark/benchmark.h>

#include <complex>

using namespace pcvx;

namespace {

CVec point2(Complex a, Complex b) {
    CVec z(2);
    z << a, b;
    return z;
}

void bm_kernel_oracle(benchmark::State& state) {
    const DomainModel ball = catalog_domain("ball", 2);
    const KernelEvaluator eval(ball);
    const CVec z = point2(Complex(0.3, 0.1), Complex(-0.2, 0.4));
    for (auto _ : state) benchmark::DoNotOptimize(eval.kernel(z));
}
BENCHMARK(bm_kernel_oracle);

void bm_kernel_series(benchmark::State& state) {
    const DomainModel ball = catalog_domain("ball", 2);
    BergmanOptions opt;
    opt.method = KernelMethod::Series;
    const KernelEvaluator eval(ball, opt);
    // Distance to the boundary controls the number of series shells.
    const double r = 1.0 - 1.0 / static_cast<double>(state.range(0));
    const CVec z = point2(Complex(r, 0.0), Complex(0.0, 0.0));
    for (auto _ : state) benchmark::DoNotOptimize(eval.kernel(z));
}
BENCHMARK(bm_kernel_series)->Arg(4)->Arg(16)->Arg(64);

void bm_kernel_gram(benchmark::State& state) {
    const DomainModel bidisc = catalog_domain("polydisc", 2);
    BergmanOptions opt;
    opt.method = KernelMethod::Gram;
    opt.degree = static_cast<int>(state.range(0));
    const KernelEvaluator eval(bidisc, opt);  // basis factored once, reused per eval
    const CVec z = point2(Complex(0.3, 0.0), Complex(-0.2, 0.1));
    for (auto _ : state) benchmark::DoNotOptimize(eval.kernel(z));
}
BENCHMARK(bm_kernel_gram)->Arg(8)->Arg(12)->Arg(16);

void bm_metric_series(benchmark::State& state) {
    const DomainModel ball = catalog_domain("ball", 2);
    BergmanOptions opt;
    opt.method = KernelMethod::Series;
    const KernelEvaluator eval(ball, opt);
    const CVec z = point2(Complex(0.5, 0.0), Complex(0.1, -0.2));
    const CVec X = point2(Complex(1.0, 0.0), Complex(0.0, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(eval.metric(z, X));
}
BENCHMARK(bm_metric_series);

void bm_levi_rank(benchmark::State& state) {
    const DomainModel product = catalog_domain("product_disc_ball", 3);
    CVec p(3);
    p << Complex(0.3, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(levi_rank(product, p));
}
BENCHMARK(bm_levi_rank);

void bm_chart_normalize(benchmark::State& state) {
    const DomainModel ball = catalog_domain("ball", 2);
    const CVec p = point2(Complex(1.0, 0.0), Complex(0.0, 0.0));
    for (auto _ : state) benchmark::DoNotOptimize(normalize_chart(ball, p));
}
BENCHMARK(bm_chart_normalize);

void bm_barrier_levi(benchmark::State& state) {
    const DomainModel ball = catalog_domain("ball", 2);
    const NormalizedChart chart = normalize_chart(ball, point2(1.0, 0.0));
    const BarrierFunction bf = build_barrier(chart, 1e-2);
    Rng rng(0xbe9cu);
    const CVec zeta = bf.q_box().sample(rng);
    const CVec Y = point2(Complex(0.6, 0.2), Complex(-0.3, 0.7));
    for (auto _ : state) benchmark::DoNotOptimize(bf.levi(zeta, Y));
}
BENCHMARK(bm_barrier_levi);

void bm_barrier_derivatives(benchmark::State& state) {
    const DomainModel ball = catalog_domain("ball", 2);
    const NormalizedChart chart = normalize_chart(ball, point2(1.0, 0.0));
    const BarrierFunction bf = build_barrier(chart, 1e-2);
    Rng rng(0xbe9cu);
    const CVec zeta = bf.q_box().sample(rng);
    for (auto _ : state) benchmark::DoNotOptimize(bf.derivatives(zeta));
}
BENCHMARK(bm_barrier_derivatives);

void bm_kobayashi_upper(benchmark::State& state) {
    const DomainModel ball = catalog_domain("ball", 2);
    const CVec z = point2(Complex(0.4, 0.1), Complex(-0.2, 0.3));
    const CVec X = point2(Complex(0.5, -0.4), Complex(0.3, 0.8));
    const int degree = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kobayashi_upper(ball, z, X, degree));
}
BENCHMARK(bm_kobayashi_upper)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
