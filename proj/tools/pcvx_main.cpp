// pcvx: command line front end for the boundary-geometry library.
//
// Subcommands take a domain description as JSON (catalog domains are
// {"name": "ball", "dimension": 2}; see the README for the polynomial
// form), a base point, and write CSV sweeps, JSON reports stamped with a
// config hash, and two-column plot-data files into --out.

#include <pcvx/barrier.hpp>
#include <pcvx/bergman.hpp>
#include <pcvx/chart.hpp>
#include <pcvx/domain.hpp>
#include <pcvx/fitting.hpp>
#include <pcvx/harness.hpp>
#include <pcvx/kobayashi.hpp>
#include <pcvx/levi.hpp>
#include <pcvx/report.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace pcvx;
using nlohmann::json;

namespace {

// One complex component: "0.3", "-1", "0.5i", "0.3+0.2i", "0.3-0.2i", "i".
Complex parse_complex(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw ArgumentError("empty point component");

    // Split at the last '+'/'-' that is not a leading sign and does not
    // follow an exponent marker.
    size_t split = std::string::npos;
    for (size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }

    auto parse_part = [](std::string part) -> double {
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        size_t used = 0;
        const double v = std::stod(part, &used);
        if (used != part.size()) throw ArgumentError("bad number '" + part + "' in point");
        return v;
    };

    if (s.back() == 'i' || s.back() == 'j') {
        s.pop_back();
        if (split == std::string::npos) return Complex(0.0, parse_part(s));
        return Complex(parse_part(s.substr(0, split)), parse_part(s.substr(split)));
    }
    if (split != std::string::npos)
        throw ArgumentError("point component '" + s + "' has two parts but no trailing i");
    return Complex(parse_part(s), 0.0);
}

CVec parse_point(const std::string& text) {
    std::vector<Complex> parts;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t comma = text.find(',', start);
        const std::string piece =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        parts.push_back(parse_complex(piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    CVec z(static_cast<int>(parts.size()));
    for (size_t j = 0; j < parts.size(); ++j) z(static_cast<int>(j)) = parts[j];
    return z;
}

json point_to_json(const CVec& z) {
    json out = json::array();
    for (int j = 0; j < z.size(); ++j) out.push_back({z(j).real(), z(j).imag()});
    return out;
}

struct SweepSpec {
    double lo = 1e-3;
    double hi = 1e-1;
    int count = 12;
};

SweepSpec parse_sweep(const std::string& text) {
    SweepSpec s;
    if (text.empty()) return s;
    const size_t c1 = text.find(':');
    const size_t c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ArgumentError("--delta-sweep wants lo:hi:count, got '" + text + "'");
    s.lo = std::stod(text.substr(0, c1));
    s.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    s.count = std::stoi(text.substr(c2 + 1));
    if (!(s.lo > 0.0) || !(s.hi > s.lo) || s.count < 2)
        throw ArgumentError("--delta-sweep wants 0 < lo < hi and count >= 2");
    return s;
}

// Options shared by the subcommands; exactly one subcommand runs per
// invocation, so a single instance can back all of them.
struct Cli {
    std::string domain_path;
    std::string point_text;
    std::string method = "oracle";
    int degree = 12;
    int disc_degree = 1;
    unsigned seed = 0xa11a;
    std::string out_dir = ".";
    std::string sweep_text;

    json domain_json;

    DomainModel domain() const { return domain_from_json(domain_json); }
    CVec point() const { return parse_point(point_text); }
    SweepSpec sweep() const { return parse_sweep(sweep_text); }

    SweepConfig sweep_config() const {
        SweepConfig cfg;
        const SweepSpec s = sweep();
        cfg.delta_min = s.lo;
        cfg.delta_max = s.hi;
        cfg.count = s.count;
        cfg.bergman.method = kernel_method_from_string(method);
        cfg.bergman.degree = degree;
        cfg.disc_degree = disc_degree;
        cfg.seed = seed;
        return cfg;
    }

    std::string path(const std::string& file) const {
        return (std::filesystem::path(out_dir) / file).string();
    }

    json config(const std::string& command) const {
        const SweepSpec s = sweep();
        return json{{"command", command},
                    {"domain", domain_json},
                    {"point", point_text},
                    {"method", method},
                    {"degree", degree},
                    {"disc_degree", disc_degree},
                    {"seed", seed},
                    {"sweep", {{"lo", s.lo}, {"hi", s.hi}, {"count", s.count}}}};
    }
};

void load_domain(Cli& cli) {
    std::ifstream in(cli.domain_path);
    if (!in) throw ArgumentError("cannot open domain file '" + cli.domain_path + "'");
    in >> cli.domain_json;
    std::filesystem::create_directories(cli.out_dir);
}

void add_common(CLI::App* cmd, Cli& cli, bool with_sweep, bool with_method) {
    cmd->add_option("domain", cli.domain_path, "domain description JSON file")->required();
    cmd->add_option("--point", cli.point_text,
                    "comma-separated complex components, e.g. 1,0 or 0.3+0.2i,-0.1")
        ->required();
    cmd->add_option("--seed", cli.seed, "RNG seed for sampled certifications");
    cmd->add_option("--out", cli.out_dir, "output directory (created if missing)");
    if (with_sweep)
        cmd->add_option("--delta-sweep", cli.sweep_text,
                        "geometric probe grid lo:hi:count (default 1e-3:1e-1:12)");
    if (with_method) {
        cmd->add_option("--method", cli.method, "kernel path: oracle, series, or gram")
            ->check(CLI::IsMember({"oracle", "series", "gram"}));
        cmd->add_option("--degree", cli.degree, "Gram basis total degree");
    }
}

void run_levi_rank(Cli& cli) {
    load_domain(cli);
    const DomainModel domain = cli.domain();
    const LeviData data = levi_rank(domain, cli.point());

    std::printf("levi rank %d of %d tangential directions (tolerance %.3e)\n", data.rank,
                static_cast<int>(data.eigenvalues.size()), data.rank_tolerance);
    std::printf("eigenvalues:");
    for (int j = 0; j < data.eigenvalues.size(); ++j)
        std::printf(" %.12g", data.eigenvalues(j));
    std::printf("\n");

    json report{{"kind", "levi_rank"},
                {"base_point", point_to_json(data.base_point)},
                {"rank", data.rank},
                {"null_dimension", static_cast<int>(data.null_basis.cols())},
                {"rank_tolerance", data.rank_tolerance},
                {"gradient_norm", data.gradient.norm()}};
    report["eigenvalues"] = json::array();
    for (int j = 0; j < data.eigenvalues.size(); ++j)
        report["eigenvalues"].push_back(data.eigenvalues(j));
    write_json_report(cli.path("levi_rank.json"), report, cli.config("levi-rank"));
    std::printf("wrote %s\n", cli.path("levi_rank.json").c_str());
}

void run_normalize(Cli& cli) {
    load_domain(cli);
    const DomainModel domain = cli.domain();
    const NormalizedChart chart = normalize_chart(domain, cli.point(), cli.seed);

    std::printf("chart at the boundary projection: rank %d, null block %d\n", chart.rank,
                chart.l);
    std::printf("lambda:");
    for (int j = 0; j < chart.lambda.size(); ++j) std::printf(" %.12g", chart.lambda(j));
    std::printf("\nvalid radius %.6g, peak radius %.6g, rescale %.6g\n", chart.valid_radius,
                chart.peak_radius, chart.zeta1_rescale);

    write_json_report(cli.path("chart.json"), chart_to_json(chart), cli.config("normalize"));
    std::printf("wrote %s\n", cli.path("chart.json").c_str());
}

void run_barrier_verify(Cli& cli) {
    load_domain(cli);
    const DomainModel domain = cli.domain();
    const SweepSpec sweep = cli.sweep();
    const NormalizedChart chart = normalize_chart(domain, cli.point(), cli.seed);

    std::vector<SweepRow> rows;
    std::vector<double> plot_delta, plot_c0;
    json per_delta = json::array();
    BarrierParams hint{};
    bool have_hint = false;
    int failures = 0;

    for (double delta : geometric_deltas(sweep.lo, sweep.hi, sweep.count)) {
        SweepRow row;
        row.delta = delta;
        row.method = "barrier";
        try {
            const BarrierFunction bf =
                build_barrier(chart, delta, 1000, have_hint ? &hint : nullptr, cli.seed);
            hint = bf.params();
            have_hint = true;
            const BarrierReport rep = verify_barrier(bf);
            const bool ok = rep.range_ok && rep.psd_ok && rep.lower_bound_ok;
            row.value = rep.c0;
            row.lower = rep.min_value;
            row.upper = rep.max_value;
            json entry = barrier_report_to_json(rep);
            entry["delta"] = delta;
            entry["params"] = {{"a", bf.params().a},
                               {"b", bf.params().b},
                               {"M", bf.params().M},
                               {"C1", bf.params().C1},
                               {"C2", bf.params().C2}};
            per_delta.push_back(entry);
            plot_delta.push_back(delta);
            plot_c0.push_back(rep.c0);
            if (!ok) ++failures;
            std::printf("delta %.3e  %s  c0 %.6e  range [%.3e, %.6f]  worst eig %.3e\n",
                        delta, ok ? "certified" : "FAILED   ", rep.c0, rep.min_value,
                        rep.max_value, rep.worst_eig_scaled);
        } catch (const std::exception& e) {
            ++failures;
            per_delta.push_back(json{{"delta", delta}, {"error", e.what()}});
            std::printf("delta %.3e  FAILED    (%s)\n", delta, e.what());
        }
        rows.push_back(row);
    }

    write_sweep_csv(cli.path("barrier_sweep.csv"), rows);
    write_json_report(cli.path("barrier_report.json"),
                      json{{"kind", "barrier_sweep"}, {"failures", failures},
                           {"reports", per_delta}},
                      cli.config("barrier-verify"));
    write_plot_data(cli.path("barrier_c0.dat"), plot_delta, plot_c0);
    std::printf("wrote %s, %s, %s\n", cli.path("barrier_sweep.csv").c_str(),
                cli.path("barrier_report.json").c_str(), cli.path("barrier_c0.dat").c_str());
    if (failures > 0) throw CertificationError(std::to_string(failures) + " deltas failed");
}

void run_bergman_fit(Cli& cli) {
    load_domain(cli);
    const DomainModel domain = cli.domain();
    const KernelExponentReport rep = fit_kernel_exponent(domain, cli.point(), cli.sweep_config());

    std::printf("kernel growth: slope %.4f (model %.1f), residual %.4f, rank %d, %s path\n",
                rep.fit.slope, rep.fit.predicted, rep.fit.residual, rep.rank,
                rep.method.c_str());
    if (rep.dropped > 0)
        std::printf("dropped %d probes below the evaluator's trust floor\n", rep.dropped);

    std::vector<SweepRow> rows;
    for (size_t i = 0; i < rep.fit.deltas.size(); ++i) {
        SweepRow row;
        row.delta = rep.fit.deltas[i];
        row.value = rep.fit.values[i];
        row.method = rep.method;
        rows.push_back(row);
    }
    write_sweep_csv(cli.path("kernel_sweep.csv"), rows);
    write_json_report(cli.path("kernel_fit.json"), report_to_json(rep),
                      cli.config("bergman-fit"));
    write_plot_data(cli.path("kernel_sweep.dat"), rep.fit.deltas, rep.fit.values);
    std::printf("wrote %s, %s, %s\n", cli.path("kernel_sweep.csv").c_str(),
                cli.path("kernel_fit.json").c_str(), cli.path("kernel_sweep.dat").c_str());
}

void run_metric_compare(Cli& cli) {
    load_domain(cli);
    const DomainModel domain = cli.domain();
    const CVec p = cli.point();
    const SweepConfig cfg = cli.sweep_config();

    const std::vector<MetricDirection> dirs = standard_directions(domain, p);
    const MetricExponentReport rep = fit_metric_exponents(domain, p, dirs, cfg);
    for (const MetricDirectionReport& d : rep.directions) {
        std::printf("%-20s (F)^2 slope %.4f (model %.1f)  kobayashi band %s (max ratio %.3g)\n",
                    d.label.c_str(), d.bergman_fit.slope, d.bergman_fit.predicted,
                    d.kobayashi_conclusive ? "conclusive" : "inconclusive", d.max_band_ratio);

        std::vector<SweepRow> rows;
        const size_t count = std::min({d.bergman_fit.deltas.size(), d.kobayashi_lower.size(),
                                       d.kobayashi_upper.size()});
        for (size_t i = 0; i < count; ++i) {
            SweepRow row;
            row.delta = d.bergman_fit.deltas[i];
            row.value = d.bergman_fit.values[i];
            row.lower = d.kobayashi_lower[i] * d.kobayashi_lower[i];
            row.upper = d.kobayashi_upper[i] * d.kobayashi_upper[i];
            row.method = rep.method;
            rows.push_back(row);
        }
        write_sweep_csv(cli.path("metric_" + d.label + ".csv"), rows);
        write_plot_data(cli.path("metric_" + d.label + ".dat"), d.bergman_fit.deltas,
                        d.bergman_fit.values);
    }
    write_json_report(cli.path("metric_fit.json"), report_to_json(rep),
                      cli.config("metric-compare"));

    const ComparabilityReport comp = comparability_band(domain, p, cfg);
    std::printf("comparability with the boundary-distance form: band %.4g (C2 %.4g, C3 %.4g, "
                "%d probes dropped)\n",
                comp.band, comp.C2, comp.C3, comp.dropped);
    std::vector<SweepRow> comp_rows;
    for (size_t i = 0; i < comp.ratios.size(); ++i) {
        SweepRow row;
        row.delta = comp.deltas[i];
        row.value = comp.ratios[i];
        row.method = comp.labels[i];
        comp_rows.push_back(row);
    }
    write_sweep_csv(cli.path("comparability.csv"), comp_rows);
    write_json_report(cli.path("comparability.json"), report_to_json(comp),
                      cli.config("metric-compare"));
    std::printf("wrote %s, %s, %s and per-direction CSV/plot files\n",
                cli.path("metric_fit.json").c_str(), cli.path("comparability.json").c_str(),
                cli.path("comparability.csv").c_str());
}

void run_detect_flat(Cli& cli) {
    load_domain(cli);
    const DomainModel domain = cli.domain();
    const FlatnessReport rep = detect_levi_flatness(domain, cli.point(), cli.sweep_config());

    std::printf("verdict: %s (estimated rank %d, direct rank %d, slope %.4f, residual %.4f)\n",
                to_string(rep.verdict).c_str(), rep.estimated_rank, rep.direct_rank, rep.slope,
                rep.residual);
    if (!rep.note.empty()) std::printf("note: %s\n", rep.note.c_str());
    write_json_report(cli.path("flatness.json"), report_to_json(rep),
                      cli.config("detect-flat"));
    std::printf("wrote %s\n", cli.path("flatness.json").c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary geometry of pseudoconvex domains: Levi ranks, normalized charts, "
                 "certified barriers, kernel/metric growth fits"};
    app.require_subcommand(1);
    Cli cli;

    add_common(app.add_subcommand("levi-rank", "Levi form rank and eigenvalues at a boundary "
                                               "point"),
               cli, false, false);
    add_common(app.add_subcommand("normalize", "build and certify the normalized boundary "
                                               "chart"),
               cli, false, false);
    add_common(app.add_subcommand("barrier-verify", "certify psh barriers across a delta "
                                                    "sweep"),
               cli, true, false);
    CLI::App* fit = app.add_subcommand("bergman-fit", "fit the kernel growth exponent along "
                                                      "the inward normal");
    add_common(fit, cli, true, true);
    CLI::App* metric = app.add_subcommand("metric-compare",
                                          "metric exponents per direction with two-sided "
                                          "Kobayashi bands, plus the distance-form "
                                          "comparability band");
    add_common(metric, cli, true, true);
    metric->add_option("--disc-degree", cli.disc_degree,
                       "polynomial degree of the analytic discs");
    CLI::App* flat = app.add_subcommand("detect-flat", "kernel-growth Levi flatness verdict");
    add_common(flat, cli, true, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("levi-rank")) run_levi_rank(cli);
        if (app.got_subcommand("normalize")) run_normalize(cli);
        if (app.got_subcommand("barrier-verify")) run_barrier_verify(cli);
        if (app.got_subcommand("bergman-fit")) run_bergman_fit(cli);
        if (app.got_subcommand("metric-compare")) run_metric_compare(cli);
        if (app.got_subcommand("detect-flat")) run_detect_flat(cli);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
