#include <pcvx/harness.hpp>

#include <pcvx/barrier.hpp>
#include <pcvx/chart.hpp>
#include <pcvx/distance.hpp>
#include <pcvx/kobayashi.hpp>
#include <pcvx/witness.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

namespace pcvx {

namespace {

void validate(const SweepConfig& config) {
    if (!(config.delta_min > 0.0) || !(config.delta_max > config.delta_min))
        throw ArgumentError("sweep config: need 0 < delta_min < delta_max");
    if (config.count < 2) throw ArgumentError("sweep config: need at least 2 probes");
    if (config.disc_degree < 1) throw ArgumentError("sweep config: disc degree must be >= 1");
}

CVec random_unit(Rng& rng, int n) {
    std::normal_distribution<double> gauss;
    CVec v(n);
    double norm = 0.0;
    do {
        for (int j = 0; j < n; ++j) v(j) = Complex(gauss(rng), gauss(rng));
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

// Certifies that the Levi rank is the same at 20 sampled boundary points
// near the base point (constant-rank hypothesis of the growth estimates).
void check_rank_constancy(const DomainModel& domain, const LeviData& ld, unsigned seed) {
    const int nt = static_cast<int>(ld.tangential_basis.cols());
    if (nt == 0) return;
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    const double radius = 0.01 * domain.circumradius();
    for (int i = 0; i < 20; ++i) {
        const CVec q = ld.base_point + radius * (ld.tangential_basis * random_unit(rng, nt));
        const LeviData nearby = levi_rank(domain, q);
        if (nearby.rank != ld.rank) {
            std::ostringstream msg;
            msg << "Levi rank drifts near the probe point: rank " << ld.rank
                << " at the base point, rank " << nearby.rank
                << " at a nearby boundary point (offset " << radius << ")";
            throw StructureError(msg.str());
        }
    }
}

struct ProbeSet {
    CVec normal;                    ///< outward unit normal at the base point
    std::vector<double> deltas;     ///< nominal offsets kept, decreasing
    std::vector<double> distances;  ///< true boundary distances
    std::vector<CVec> points;
    int dropped = 0;
};

ProbeSet make_probes(const DomainModel& domain, const CVec& base, const SweepConfig& config,
                     double floor) {
    ProbeSet out;
    out.normal = outward_normal(domain, base);
    for (double d : geometric_deltas(config.delta_min, config.delta_max, config.count)) {
        if (d < floor) {
            ++out.dropped;
            continue;
        }
        CVec z = base - d * out.normal;
        if (domain.rho(z) >= 0.0)
            throw ArgumentError(
                "sweep probe left the domain; the inward normal ray exits the patch "
                "before delta_max");
        out.deltas.push_back(d);
        out.distances.push_back(distance_to_boundary(domain, z));
        out.points.push_back(std::move(z));
    }
    return out;
}

nlohmann::json cvec_to_json(const CVec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (int j = 0; j < v.size(); ++j)
        arr.push_back(nlohmann::json::array({v(j).real(), v(j).imag()}));
    return arr;
}

}  // namespace

KernelExponentReport fit_kernel_exponent(const DomainModel& domain, const CVec& p,
                                         const SweepConfig& config) {
    validate(config);
    const LeviData ld = levi_rank(domain, p);
    check_rank_constancy(domain, ld, config.seed);
    const KernelEvaluator evaluator(domain, config.bergman);
    ProbeSet probes = make_probes(domain, ld.base_point, config, evaluator.min_trust_distance());
    if (probes.points.size() < 4)
        throw NumericalError(
            "fit_kernel_exponent: fewer than 4 probes above the evaluator's resolution "
            "floor; widen the delta range or lower the floor");
    std::vector<double> values;
    values.reserve(probes.points.size());
    for (const CVec& z : probes.points) values.push_back(evaluator.kernel(z));

    KernelExponentReport out;
    out.probe_point = ld.base_point;
    out.rank = ld.rank;
    out.dropped = probes.dropped;
    out.method = to_string(config.bergman.method);
    out.fit = make_exponent_fit(std::move(probes.distances), std::move(values),
                                -(2.0 + ld.rank));
    return out;
}

std::vector<MetricDirection> standard_directions(const DomainModel& domain, const CVec& p) {
    const LeviData ld = levi_rank(domain, p);
    std::vector<MetricDirection> out;
    out.push_back({"normal", outward_normal(domain, ld.base_point), -2.0});
    if (ld.positive_basis.cols() > 0)
        out.push_back({"tangential_positive", ld.positive_basis.col(0), -1.0});
    if (ld.null_basis.cols() > 0)
        out.push_back({"tangential_null", ld.null_basis.col(0), 0.0});
    return out;
}

MetricExponentReport fit_metric_exponents(const DomainModel& domain, const CVec& p,
                                          const std::vector<MetricDirection>& directions,
                                          const SweepConfig& config) {
    validate(config);
    if (directions.empty())
        throw ArgumentError("fit_metric_exponents: need at least one direction");
    const LeviData ld = levi_rank(domain, p);
    const KernelEvaluator evaluator(domain, config.bergman);
    const ProbeSet probes =
        make_probes(domain, ld.base_point, config, evaluator.min_trust_distance());
    if (probes.points.size() < 4)
        throw NumericalError(
            "fit_metric_exponents: fewer than 4 probes above the evaluator's "
            "resolution floor");

    MetricExponentReport out;
    out.probe_point = ld.base_point;
    out.rank = ld.rank;
    out.null_dim = static_cast<int>(ld.null_basis.cols());
    out.dropped = probes.dropped;
    out.method = to_string(config.bergman.method);

    DiscFamily family;
    family.degree = config.disc_degree;

    for (const MetricDirection& dir : directions) {
        MetricDirectionReport rep;
        rep.label = dir.label;
        rep.direction = dir.direction;

        std::vector<double> f2;
        f2.reserve(probes.points.size());
        for (const CVec& z : probes.points) {
            const double F = evaluator.metric(z, dir.direction);
            f2.push_back(F * F);
        }
        rep.bergman_fit = make_exponent_fit(probes.distances, f2, dir.predicted);

        bool conclusive = true;
        double worst = 0.0;
        std::vector<double> band_mid;
        for (const CVec& z : probes.points) {
            const double upper = kobayashi_upper_disc(domain, z, dir.direction, family).upper;
            const double lower = sibony_lower(domain, z, dir.direction);
            rep.kobayashi_upper.push_back(upper);
            rep.kobayashi_lower.push_back(lower);
            const double ratio =
                lower > 0.0 ? upper / lower : std::numeric_limits<double>::infinity();
            worst = std::max(worst, ratio);
            if (ratio <= 10.0)
                band_mid.push_back(lower * upper);  // geometric midpoint of the F^2 band
            else
                conclusive = false;
        }
        rep.max_band_ratio = worst;
        rep.kobayashi_conclusive = conclusive;
        if (conclusive)
            rep.kobayashi_fit = make_exponent_fit(probes.distances, band_mid, dir.predicted);
        out.directions.push_back(std::move(rep));
    }
    return out;
}

CatlinReport catlin_consistency(const DomainModel& domain, const CVec& p,
                                const SweepConfig& config) {
    validate(config);
    const NormalizedChart chart = normalize_chart(domain, p, config.seed);
    const KernelEvaluator evaluator(domain, config.bergman);
    const CVec nu = outward_normal(domain, chart.base_point);
    const double floor = evaluator.min_trust_distance();

    CatlinReport out;
    out.probe_point = chart.base_point;
    out.rank = chart.rank;
    out.method = to_string(config.bergman.method);

    std::ostringstream note;
    BarrierParams hint{};
    bool have_hint = false;
    for (double d : geometric_deltas(config.delta_min, config.delta_max, config.count)) {
        if (d < floor) {
            ++out.dropped;
            continue;
        }
        double c0 = 0.0;
        try {
            const BarrierFunction bf =
                build_barrier(chart, d, 1000, have_hint ? &hint : nullptr, config.seed);
            const BarrierReport br = verify_barrier(bf);
            if (!(br.range_ok && br.psd_ok && br.lower_bound_ok))
                throw CertificationError(br.worst_note.empty()
                                             ? "sampled barrier certification failed"
                                             : br.worst_note);
            hint = bf.params();
            have_hint = true;
            c0 = br.c0;
        } catch (const Error& e) {
            ++out.barrier_failures;
            note << "delta " << d << ": " << e.what() << "; ";
            continue;
        }
        const CVec z = chart.base_point - d * nu;
        const double K = evaluator.kernel(z);
        const double predicted = std::pow(d, -(2.0 + chart.rank));
        out.deltas.push_back(d);
        out.kernel_values.push_back(K);
        out.predicted.push_back(predicted);
        out.ratios.push_back(K / predicted);
        out.barrier_c0.push_back(c0);
    }

    if (out.ratios.size() >= 2) {
        const auto [lo, hi] = std::minmax_element(out.ratios.begin(), out.ratios.end());
        out.band = *hi / *lo;
    } else {
        note << "too few certified deltas for a ratio band; ";
    }
    out.note = note.str();
    return out;
}

std::string to_string(FlatnessVerdict v) {
    switch (v) {
        case FlatnessVerdict::Flat: return "flat";
        case FlatnessVerdict::PositiveRank: return "positive_rank";
        case FlatnessVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

FlatnessReport detect_levi_flatness(const DomainModel& domain, const CVec& p,
                                    const SweepConfig& config) {
    FlatnessReport out;
    const LeviData ld = levi_rank(domain, p);
    out.direct_rank = ld.rank;

    KernelExponentReport kernel;
    try {
        kernel = fit_kernel_exponent(domain, p, config);
    } catch (const Error& e) {
        out.note = std::string("kernel sweep unavailable: ") + e.what();
        return out;
    }
    out.slope = kernel.fit.slope;
    out.residual = kernel.fit.residual;

    if (out.residual > 0.12) {
        out.note = "log-log residual too large for a stable exponent";
        return out;
    }

    const double s = out.slope;
    if (std::abs(s + 2.0) <= 0.1) {
        out.estimated_rank = 0;
        if (ld.rank == 0) {
            out.verdict = FlatnessVerdict::Flat;
            out.note = "kernel grows like the Levi-flat model and the Levi form vanishes";
        } else {
            out.note = "kernel exponent says flat but the Levi form has positive rank";
        }
    } else if (s <= -2.5) {
        const int estimated = static_cast<int>(std::lround(-s)) - 2;
        out.estimated_rank = estimated;
        if (estimated == ld.rank && estimated >= 1) {
            out.verdict = FlatnessVerdict::PositiveRank;
            std::ostringstream msg;
            msg << "kernel exponent and Levi eigenvalue count agree on rank " << estimated;
            out.note = msg.str();
        } else {
            std::ostringstream msg;
            msg << "kernel exponent suggests rank " << estimated
                << " but the Levi form has rank " << ld.rank;
            out.note = msg.str();
        }
    } else {
        out.note = "kernel exponent sits between the flat and positive-rank regimes";
    }
    return out;
}

ComparabilityReport comparability_band(const DomainModel& domain, const CVec& p,
                                       const SweepConfig& config) {
    validate(config);
    const LeviData ld = levi_rank(domain, p);
    const KernelEvaluator evaluator(domain, config.bergman);
    const ProbeSet probes =
        make_probes(domain, ld.base_point, config, evaluator.min_trust_distance());
    if (probes.points.empty())
        throw NumericalError("comparability_band: no probes above the resolution floor");
    const int n = domain.dimension();
    Rng rng(config.seed ^ 0x5d1a4f02u);

    ComparabilityReport out;
    out.probe_point = ld.base_point;
    out.dropped = probes.dropped;
    out.method = to_string(config.bergman.method);

    std::vector<double> f2;
    std::vector<double> mform;
    for (size_t i = 0; i < probes.points.size(); ++i) {
        std::vector<std::pair<std::string, CVec>> dirs;
        dirs.emplace_back("normal", probes.normal);
        if (ld.positive_basis.cols() > 0)
            dirs.emplace_back("tangential_positive", ld.positive_basis.col(0));
        if (ld.null_basis.cols() > 0)
            dirs.emplace_back("tangential_null", ld.null_basis.col(0));
        dirs.emplace_back("random_1", random_unit(rng, n));
        dirs.emplace_back("random_2", random_unit(rng, n));
        for (const auto& [label, X] : dirs) {
            const double F = evaluator.metric(probes.points[i], X);
            f2.push_back(F * F);
            mform.push_back(comparability_M(domain, probes.points[i], X));
            out.deltas.push_back(probes.distances[i]);
            out.labels.push_back(label);
        }
    }

    double best_band = std::numeric_limits<double>::infinity();
    double best_c3 = 1e-9;
    for (int k = 0; k < 400; ++k) {
        const double c3 = std::pow(10.0, -9.0 + 18.0 * k / 399.0);
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (size_t i = 0; i < f2.size(); ++i) {
            const double r = f2[i] / (mform[i] + c3);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        const double band = hi / lo;
        if (band < best_band) {
            best_band = band;
            best_c3 = c3;
        }
    }

    out.C3 = best_c3;
    out.band = best_band;
    double sum_log = 0.0;
    for (size_t i = 0; i < f2.size(); ++i) {
        const double r = f2[i] / (mform[i] + best_c3);
        out.ratios.push_back(r);
        sum_log += std::log(r);
    }
    out.C2 = std::exp(sum_log / static_cast<double>(out.ratios.size()));
    return out;
}

nlohmann::json exponent_fit_to_json(const ExponentFit& fit) {
    return nlohmann::json{{"deltas", fit.deltas},
                          {"values", fit.values},
                          {"slope", fit.slope},
                          {"predicted", fit.predicted},
                          {"residual", fit.residual}};
}

nlohmann::json report_to_json(const KernelExponentReport& report) {
    return nlohmann::json{{"kind", "kernel_exponent"},
                          {"probe_point", cvec_to_json(report.probe_point)},
                          {"rank", report.rank},
                          {"dropped", report.dropped},
                          {"method", report.method},
                          {"fit", exponent_fit_to_json(report.fit)}};
}

nlohmann::json report_to_json(const MetricExponentReport& report) {
    nlohmann::json dirs = nlohmann::json::array();
    for (const MetricDirectionReport& d : report.directions) {
        nlohmann::json j{{"label", d.label},
                         {"direction", cvec_to_json(d.direction)},
                         {"bergman_fit", exponent_fit_to_json(d.bergman_fit)},
                         {"kobayashi_lower", d.kobayashi_lower},
                         {"kobayashi_upper", d.kobayashi_upper},
                         {"kobayashi_conclusive", d.kobayashi_conclusive},
                         {"max_band_ratio", d.max_band_ratio}};
        if (d.kobayashi_conclusive) j["kobayashi_fit"] = exponent_fit_to_json(d.kobayashi_fit);
        dirs.push_back(std::move(j));
    }
    return nlohmann::json{{"kind", "metric_exponents"},
                          {"probe_point", cvec_to_json(report.probe_point)},
                          {"rank", report.rank},
                          {"null_dim", report.null_dim},
                          {"dropped", report.dropped},
                          {"method", report.method},
                          {"directions", std::move(dirs)}};
}

nlohmann::json report_to_json(const CatlinReport& report) {
    return nlohmann::json{{"kind", "catlin_consistency"},
                          {"probe_point", cvec_to_json(report.probe_point)},
                          {"rank", report.rank},
                          {"deltas", report.deltas},
                          {"kernel_values", report.kernel_values},
                          {"predicted", report.predicted},
                          {"ratios", report.ratios},
                          {"barrier_c0", report.barrier_c0},
                          {"band", report.band},
                          {"barrier_failures", report.barrier_failures},
                          {"dropped", report.dropped},
                          {"note", report.note},
                          {"method", report.method}};
}

nlohmann::json report_to_json(const FlatnessReport& report) {
    return nlohmann::json{{"kind", "flatness"},
                          {"verdict", to_string(report.verdict)},
                          {"estimated_rank", report.estimated_rank},
                          {"direct_rank", report.direct_rank},
                          {"slope", report.slope},
                          {"residual", report.residual},
                          {"note", report.note}};
}

nlohmann::json report_to_json(const ComparabilityReport& report) {
    return nlohmann::json{{"kind", "comparability"},
                          {"probe_point", cvec_to_json(report.probe_point)},
                          {"C2", report.C2},
                          {"C3", report.C3},
                          {"band", report.band},
                          {"deltas", report.deltas},
                          {"ratios", report.ratios},
                          {"labels", report.labels},
                          {"dropped", report.dropped},
                          {"method", report.method}};
}

}  // namespace pcvx
