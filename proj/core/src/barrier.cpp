#include <pcvx/barrier.hpp>

#include <pcvx/cutoffs.hpp>
#include <pcvx/fitting.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace pcvx {

namespace {

double block_weight(int j, double delta, int rank) {
    if (j == 0) return 1.0 / (delta * delta);
    if (j <= rank) return 1.0 / delta;
    return 1.0;
}

// The plateau cutoff enters the barrier with a widened descent: chi2' is
// active only where chi1 >= 1/2 e^{-M rho/delta} >= 1/2, and there the Levi
// form gains only O(M/delta) in the tangential slots while the cutoff loses
// |chi1'| * weight / a^2.  Stretching the descent over u in [1, kChiWiden]
// caps |chi1'| near 2.2/(kChiWiden-1) on the active set, which a searchable
// M can dominate.  The affine map sends u=1 to the descent start and
// u=kChiWiden to its end; below u=1 the profile is identically 1.
constexpr double kChiWiden = 12.0;
constexpr double kWideChain = 0.5 / (kChiWiden - 1.0);

double wide_arg(double u) { return 0.5 + kWideChain * (u - 1.0); }

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

}  // namespace

double omega_weight(const CVec& X, double delta, int l) {
    if (!(delta > 0.0)) throw ArgumentError("omega_weight: delta must be positive");
    const int n = static_cast<int>(X.size());
    if (l < 0 || l > n - 1) throw ArgumentError("omega_weight: invalid null dimension");
    const int rank = n - 1 - l;
    double w = 0.0;
    for (int j = 0; j < n; ++j) w += block_weight(j, delta, rank) * std::norm(X(j));
    return w;
}

FrequencyBox FrequencyBox::P(double delta, double a, int dim, int rank) {
    FrequencyBox box;
    box.kind = Kind::P;
    box.delta = delta;
    box.scale = a;
    box.dim = dim;
    box.rank = rank;
    return box;
}

FrequencyBox FrequencyBox::Q(double delta, double c, int dim, int rank) {
    FrequencyBox box;
    box.kind = Kind::Q;
    box.delta = delta;
    box.scale = c;
    box.dim = dim;
    box.rank = rank;
    return box;
}

Complex FrequencyBox::center0() const {
    return kind == Kind::Q ? Complex(-scale * delta, 0.0) : Complex(0.0, 0.0);
}

bool FrequencyBox::contains(const CVec& zeta) const {
    const double s = kind == Kind::Q ? scale * scale : scale;
    for (int j = 0; j < dim; ++j) {
        double half;
        if (j == 0)
            half = s * delta;
        else if (j <= rank)
            half = s * std::sqrt(delta);
        else
            half = s;
        const Complex c = j == 0 ? center0() : Complex(0.0, 0.0);
        if (std::abs(zeta(j) - c) >= half) return false;
    }
    return true;
}

CVec FrequencyBox::sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double s = kind == Kind::Q ? scale * scale : scale;
    CVec zeta(dim);
    for (int j = 0; j < dim; ++j) {
        double half;
        if (j == 0)
            half = s * delta;
        else if (j <= rank)
            half = s * std::sqrt(delta);
        else
            half = s;
        const double r = half * std::sqrt(unif(rng));
        const double th = 2.0 * std::numbers::pi * unif(rng);
        zeta(j) = Complex(r * std::cos(th), r * std::sin(th));
    }
    zeta(0) += center0();
    return zeta;
}

BarrierFunction::BarrierFunction(NormalizedChart chart, double delta,
                                 BarrierParams params)
    : chart_(std::move(chart)), delta_(delta), params_(params) {
    if (!(delta > 0.0)) throw ArgumentError("barrier: delta must be positive");
}

FrequencyBox BarrierFunction::p_box(double widen) const {
    return FrequencyBox::P(delta_, params_.a * widen, chart_.dim, chart_.rank);
}

FrequencyBox BarrierFunction::q_box() const {
    return FrequencyBox::Q(delta_, params_.c(), chart_.dim, chart_.rank);
}

CVec BarrierFunction::sample_patch(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double R = chart_.valid_radius;
    for (int attempt = 0; attempt < 20000; ++attempt) {
        CVec zeta = random_unit(chart_.dim, rng);
        zeta *= R * std::pow(unif(rng), 1.0 / (2.0 * chart_.dim));
        if (chart_.rho(zeta) < 0.0) return zeta;
    }
    throw NumericalError("barrier: interior patch sampling failed");
}

DerivativeBundle BarrierFunction::derivatives(const CVec& zeta) const {
    const int n = chart_.dim;
    if (zeta.size() != n) throw ArgumentError("barrier: wrong dimension");
    const double delta = delta_;
    const double a2 = params_.a * params_.a;
    const double m = params_.M / delta;

    DerivativeBundle r = chart_.rho_derivatives(zeta);

    // u = omega(zeta, delta) / a^2 and its derivatives.
    double u = 0.0;
    CVec du(n);
    RVec w(n);
    for (int j = 0; j < n; ++j) {
        w(j) = block_weight(j, delta, chart_.rank);
        u += w(j) * std::norm(zeta(j));
        du(j) = w(j) * std::conj(zeta(j));
    }
    u /= a2;
    du /= a2;

    const double w = wide_arg(u);
    const double c1v = cutoffs::chi1(w);
    const double c1d = kWideChain * cutoffs::chi1_d1(w);
    const double c1dd = kWideChain * kWideChain * cutoffs::chi1_d2(w);

    // phi = chi1(wide_arg(u))
    const double phi = c1v;
    const CVec dphi = c1d * du;
    CMat phi_h = c1dd * (du * du.conjugate().transpose());
    for (int j = 0; j < n; ++j) phi_h(j, j) += c1d * w(j) / a2;
    const CMat phi_s = c1dd * (du * du.transpose());

    // E = exp(m rho)
    const double E = std::exp(std::min(m * r.value, 300.0));
    const CVec dE = (m * E) * r.grad;
    const CMat E_h =
        (m * E) * (r.hermitian + m * (r.grad * r.grad.conjugate().transpose()));
    const CMat E_s = (m * E) * (r.holomorphic + m * (r.grad * r.grad.transpose()));

    // G = phi * E
    const double G = phi * E;
    const CVec dG = dphi * E + phi * dE;
    const CMat G_h = phi_h * E + dphi * dE.conjugate().transpose() +
                     dE * dphi.conjugate().transpose() + phi * E_h;
    const CMat G_s = phi_s * E + dphi * dE.transpose() + dE * dphi.transpose() + phi * E_s;

    const double c2d = cutoffs::chi2_d1(G);
    const double c2dd = cutoffs::chi2_d2(G);

    DerivativeBundle out;
    out.value = (cutoffs::chi2(G) + params_.C2 * zeta.squaredNorm()) / params_.C1;
    out.grad = (c2d * dG + params_.C2 * zeta.conjugate()) / params_.C1;
    CMat H = c2dd * (dG * dG.conjugate().transpose()) + c2d * G_h;
    for (int j = 0; j < n; ++j) H(j, j) += params_.C2;
    out.hermitian = H / params_.C1;
    out.holomorphic = (c2dd * (dG * dG.transpose()) + c2d * G_s) / params_.C1;
    return out;
}

double BarrierFunction::value(const CVec& zeta) const {
    const double a2 = params_.a * params_.a;
    double u = 0.0;
    for (int j = 0; j < chart_.dim; ++j)
        u += block_weight(j, delta_, chart_.rank) * std::norm(zeta(j));
    u /= a2;
    const double G = cutoffs::chi1(wide_arg(u)) *
                     std::exp(std::min(params_.M / delta_ * chart_.rho(zeta), 300.0));
    return (cutoffs::chi2(G) + params_.C2 * zeta.squaredNorm()) / params_.C1;
}

double BarrierFunction::levi(const CVec& zeta, const CVec& Y) const {
    DerivativeBundle b = derivatives(zeta);
    return (Y.transpose() * b.hermitian * Y.conjugate())(0, 0).real();
}

namespace {

// One certification pass; counts are (region, probe, directions-per-probe).
BarrierReport certify(const BarrierFunction& bf, int region_samples,
                      int probe_samples, int directions, unsigned seed) {
    BarrierReport rep;
    rep.region_samples = region_samples;
    rep.probe_samples = probe_samples;
    Rng rng(seed);

    const NormalizedChart& chart = bf.chart();
    const int n = chart.dim;
    // Widened enough to straddle the full cutoff descent u in [1, kChiWiden]:
    // sqrt(kChiWiden) ~ 3.46, so 3.5 reaches just past the far edge.
    const FrequencyBox concentrated = bf.p_box(3.5);
    const FrequencyBox probe = bf.q_box();
    const FrequencyBox envelope = bf.p_box(bf.params().b);

    rep.range_ok = true;
    rep.psd_ok = true;
    rep.min_value = 1e300;
    rep.max_value = -1e300;
    rep.worst_eig_scaled = 1e300;

    for (int i = 0; i < region_samples; ++i) {
        CVec zeta;
        if (i % 2 == 0) {
            zeta = bf.sample_patch(rng);
        } else {
            bool found = false;
            for (int attempt = 0; attempt < 200; ++attempt) {
                CVec cand = concentrated.sample(rng);
                if (cand.norm() < chart.valid_radius && chart.rho(cand) < 0.0) {
                    zeta = cand;
                    found = true;
                    break;
                }
            }
            if (!found) zeta = bf.sample_patch(rng);
        }
        DerivativeBundle b = bf.derivatives(zeta);
        rep.min_value = std::min(rep.min_value, b.value);
        rep.max_value = std::max(rep.max_value, b.value);
        if (b.value < -1e-12 || b.value > 1.0 + 1e-12) {
            rep.range_ok = false;
            std::ostringstream os;
            os << "range violation g=" << b.value;
            rep.worst_note = os.str();
        }
        Eigen::SelfAdjointEigenSolver<CMat> es(
            0.5 * (b.hermitian + b.hermitian.adjoint()));
        const double scale = 1.0 + b.hermitian.cwiseAbs().maxCoeff();
        const double scaled = es.eigenvalues()(0) / scale;
        rep.worst_eig_scaled = std::min(rep.worst_eig_scaled, scaled);
        if (scaled < -1e-9) {
            rep.psd_ok = false;
            if (rep.worst_note.empty()) {
                std::ostringstream os;
                os << "hessian eigenvalue " << es.eigenvalues()(0) << " at |zeta|="
                   << zeta.norm();
                rep.worst_note = os.str();
            }
        }
    }

    // Probe-box lower bound: fitted floor of levi(zeta, Y)/omega(Y, delta).
    rep.lower_bound_ok = true;
    double c0 = 1e300;
    int escaped = 0;
    for (int i = 0; i < probe_samples; ++i) {
        CVec zeta = probe.sample(rng);
        if (!(chart.rho(zeta) < 0.0) || zeta.norm() >= chart.valid_radius ||
            !envelope.contains(zeta)) {
            ++escaped;
            continue;
        }
        DerivativeBundle b = bf.derivatives(zeta);
        for (int d = 0; d < directions; ++d) {
            CVec Y;
            if (d < n) {
                Y = CVec::Zero(n);
                Y(d) = 1.0;
            } else {
                Y = random_unit(n, rng);
            }
            const double L = (Y.transpose() * b.hermitian * Y.conjugate())(0, 0).real();
            const double w = omega_weight(Y, bf.delta(), chart.l);
            c0 = std::min(c0, L / w);
        }
    }
    if (escaped > probe_samples / 100) {
        rep.lower_bound_ok = false;
        rep.worst_note = "probe box escapes the certified patch";
    }
    rep.c0 = c0 == 1e300 ? 0.0 : c0;
    if (!(rep.c0 > 0.0)) rep.lower_bound_ok = false;
    return rep;
}

}  // namespace

BarrierReport verify_barrier(const BarrierFunction& bf, int region_samples,
                             int probe_samples, int directions, unsigned seed) {
    return certify(bf, region_samples, probe_samples, directions, seed);
}

BarrierFunction build_barrier(const NormalizedChart& chart, double delta,
                              int search_budget, const BarrierParams* hint,
                              unsigned seed) {
    const double R = chart.valid_radius;
    if (!(delta > 0.0) || delta >= 0.5 * R)
        throw ArgumentError(
            "build_barrier: delta out of range for this chart's certified radius");

    // The widened profile's bump support stretches to omega <= kChiWiden * a^2,
    // so the largest block extent is sqrt(kChiWiden) * a * (block scale); cap a
    // so that support stays inside the certified patch in every block.
    const double reach = std::sqrt(kChiWiden);
    double a0 = std::min(1.0, 0.45 * R / (reach * std::sqrt(delta)));
    if (chart.l > 0) a0 = std::min(a0, 0.45 * R / reach);
    std::vector<BarrierParams> tuples;
    if (hint) tuples.push_back(*hint);
    for (double a = a0; a > a0 / 9.0; a *= 0.5) {
        for (double M = 8.0; M <= 256.0; M *= 2.0) {
            for (double b : {0.5, 0.25, 0.125, 0.0625, 0.03125}) {
                const double c = 0.5 * a * b;
                // The convex profile must be active on the probe box:
                // G = exp(M rho/delta) there, and chi2' vanishes below 1/2.
                if (std::exp(-M * (c + 2.0 * c * c)) <= 0.52) continue;
                for (double C2 : {1.0, 4.0, 16.0, 64.0, 256.0}) {
                    BarrierParams p;
                    p.a = a;
                    p.b = b;
                    p.M = M;
                    p.C2 = C2;
                    p.C1 = 1.01 * (cutoffs::chi2(1.0) + C2 * R * R);
                    tuples.push_back(p);
                }
            }
        }
    }

    std::string last_note = "no parameter tuple attempted";
    int tried = 0;
    for (const BarrierParams& p : tuples) {
        if (tried >= search_budget) break;
        ++tried;
        BarrierParams q = p;
        if (q.C1 <= 0.0) q.C1 = 1.01 * (cutoffs::chi2(1.0) + q.C2 * R * R);
        BarrierFunction bf(chart, delta, q);
        BarrierReport quick = certify(bf, 500, 200, 20, seed);
        if (!(quick.range_ok && quick.psd_ok && quick.lower_bound_ok)) {
            last_note = quick.worst_note.empty() ? "quick certification failed"
                                                 : quick.worst_note;
            continue;
        }
        BarrierReport full = certify(bf, 10000, 1000, 100, seed + 1);
        if (full.range_ok && full.psd_ok && full.lower_bound_ok) return bf;
        last_note = full.worst_note.empty() ? "full certification failed"
                                            : full.worst_note;
    }
    throw CertificationError("build_barrier: search budget exhausted (" + last_note +
                             ")");
}

std::vector<DerivativeScalingFit> barrier_derivative_scaling(
    const std::vector<BarrierFunction>& sweep, int samples_per_delta,
    unsigned seed) {
    if (sweep.size() < 2)
        throw ArgumentError("barrier_derivative_scaling: need at least two deltas");
    const NormalizedChart& chart = sweep.front().chart();
    const int n = chart.dim;
    const int rank = chart.rank;
    const int l = chart.l;

    struct Probe {
        std::string label;
        double expected;
    };
    std::vector<Probe> probes = {{"grad_normal", -1.0}, {"hess_normal_normal", -2.0},
                                 {"third_normal", -3.0}};
    if (rank > 0) {
        probes.push_back({"grad_sp", -0.5});
        probes.push_back({"hess_normal_sp", -1.5});
        probes.push_back({"hess_sp_sp", -1.0});
    }
    if (l > 0) {
        probes.push_back({"grad_null", 0.0});
        probes.push_back({"hess_null_null", 0.0});
    }

    std::vector<std::vector<double>> maxima(probes.size(),
                                            std::vector<double>(sweep.size(), 0.0));
    std::vector<double> deltas;

    for (size_t si = 0; si < sweep.size(); ++si) {
        const BarrierFunction& bf = sweep[si];
        deltas.push_back(bf.delta());
        Rng rng(seed);  // same unit draws at every delta: boxes scale them
        const FrequencyBox box = bf.p_box(1.2);
        const FrequencyBox probe_box = bf.q_box();
        for (int i = 0; i < samples_per_delta; ++i) {
            CVec zeta = (i % 3 == 0) ? probe_box.sample(rng) : box.sample(rng);
            if (!(bf.chart().rho(zeta) < 0.0) || zeta.norm() >= chart.valid_radius)
                continue;
            DerivativeBundle b = bf.derivatives(zeta);
            auto record = [&](const std::string& label, double v) {
                for (size_t k = 0; k < probes.size(); ++k)
                    if (probes[k].label == label)
                        maxima[k][si] = std::max(maxima[k][si], std::abs(v));
            };
            record("grad_normal", std::abs(b.grad(0)));
            record("hess_normal_normal", std::abs(b.hermitian(0, 0)));
            for (int j = 1; j <= rank; ++j) {
                record("grad_sp", std::abs(b.grad(j)));
                record("hess_normal_sp", std::abs(b.hermitian(0, j)));
                record("hess_sp_sp", std::abs(b.hermitian(j, j)));
            }
            for (int j = rank + 1; j < n; ++j) {
                record("grad_null", std::abs(b.grad(j)));
                record("hess_null_null", std::abs(b.hermitian(j, j)));
            }
            if (i % 5 == 0) {
                const double h = 1e-2 * bf.delta();
                CVec zp = zeta, zm = zeta;
                zp(0) += h;
                zm(0) -= h;
                const double d3 = std::abs(bf.derivatives(zp).hermitian(0, 0).real() -
                                           bf.derivatives(zm).hermitian(0, 0).real()) /
                                  (2.0 * h);
                record("third_normal", d3);
            }
        }
    }

    std::vector<DerivativeScalingFit> out;
    for (size_t k = 0; k < probes.size(); ++k) {
        DerivativeScalingFit fit;
        fit.label = probes[k].label;
        fit.expected = probes[k].expected;
        fit.values = maxima[k];
        bool positive = true;
        for (double v : maxima[k]) positive = positive && v > 0.0;
        if (positive) {
            fit.slope = fit_log_log(deltas, maxima[k]).slope;
        } else {
            fit.slope = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(std::move(fit));
    }
    return out;
}

nlohmann::json barrier_report_to_json(const BarrierReport& report) {
    nlohmann::json j;
    j["range_ok"] = report.range_ok;
    j["min_value"] = report.min_value;
    j["max_value"] = report.max_value;
    j["psd_ok"] = report.psd_ok;
    j["worst_eig_scaled"] = report.worst_eig_scaled;
    j["lower_bound_ok"] = report.lower_bound_ok;
    j["c0"] = report.c0;
    j["region_samples"] = report.region_samples;
    j["probe_samples"] = report.probe_samples;
    j["worst_note"] = report.worst_note;
    return j;
}

}  // namespace pcvx
