#pragma once

#include <pcvx/types.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pcvx {

/// One line of a sweep CSV.  Fields that do not apply stay NaN and are
/// written as empty cells.
struct SweepRow {
    double delta = std::numeric_limits<double>::quiet_NaN();
    double value = std::numeric_limits<double>::quiet_NaN();
    double lower = std::numeric_limits<double>::quiet_NaN();
    double upper = std::numeric_limits<double>::quiet_NaN();
    std::string method;
    double condition = std::numeric_limits<double>::quiet_NaN();
};

/// Writes "delta,value,lower,upper,method,condition" rows with full double
/// round-trip precision.  Throws ArgumentError when the file cannot be
/// opened.
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

/// FNV-1a (64-bit) of the canonical (sorted-key, no-whitespace) dump of a
/// JSON value, as a fixed-width hex string.  Stable across runs and
/// platforms; used to stamp reports with the configuration that produced
/// them.
std::string config_hash(const nlohmann::json& config);

/// Writes `report` to `path` with a "config" object and its "config_hash"
/// injected at the top level.
void write_json_report(const std::string& path, nlohmann::json report,
                       const nlohmann::json& config);

/// Plain two-column "x y" lines for external plotting.
void write_plot_data(const std::string& path, const std::vector<double>& x,
                     const std::vector<double>& y);

}  // namespace pcvx
