#include <pcvx/report.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pcvx {

namespace {

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open output file: " + path);
    out << std::setprecision(17);
    return out;
}

void put_cell(std::ofstream& out, double v) {
    if (std::isfinite(v)) out << v;
}

}  // namespace

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out = open_or_throw(path);
    out << "delta,value,lower,upper,method,condition\n";
    for (const SweepRow& row : rows) {
        put_cell(out, row.delta);
        out << ',';
        put_cell(out, row.value);
        out << ',';
        put_cell(out, row.lower);
        out << ',';
        put_cell(out, row.upper);
        out << ',' << row.method << ',';
        put_cell(out, row.condition);
        out << '\n';
    }
    if (!out) throw ArgumentError("failed writing output file: " + path);
}

std::string config_hash(const nlohmann::json& config) {
    // nlohmann::json objects iterate in sorted key order, so dump() is
    // already canonical for our purposes.
    const std::string canonical = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

void write_json_report(const std::string& path, nlohmann::json report,
                       const nlohmann::json& config) {
    report["config"] = config;
    report["config_hash"] = config_hash(config);
    std::ofstream out = open_or_throw(path);
    out << report.dump(2) << '\n';
    if (!out) throw ArgumentError("failed writing output file: " + path);
}

void write_plot_data(const std::string& path, const std::vector<double>& x,
                     const std::vector<double>& y) {
    if (x.size() != y.size())
        throw ArgumentError("plot data columns must have equal length");
    std::ofstream out = open_or_throw(path);
    for (size_t i = 0; i < x.size(); ++i) out << x[i] << ' ' << y[i] << '\n';
    if (!out) throw ArgumentError("failed writing output file: " + path);
}

}  // namespace pcvx
