// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Analytical bandwidth, utilization, current and efficiency model.
//
// Unit conventions:
//   * Vendor memory bandwidths are decimal GB/s (1e9 bytes/s).
//   * peak_bandwidth_gib_s() follows the node-array arithmetic and divides
//     by 1024^3, which is how the 447 GB/s single-chip figure is obtained.
//   * TOPS are 1e12 operations per second; powers are milliwatts.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nvtwin {

inline constexpr double kDefaultBitsPerRead = 24.0;
/// Two 16-bit operands plus one 16-bit instruction.
inline constexpr double kDefaultBytesPerOp = 3.0 * 16.0 / 8.0;
inline constexpr double kReferenceProcessNm = 7.0;

/// nodes * clock * bits / 8 / 1024^3.
double peak_bandwidth_gib_s(double nodes, double clock_hz,
                            double bits_per_read = kDefaultBitsPerRead) noexcept;

/// Same figure in decimal bytes (nodes * clock * bits / 8 / 1e9).
double peak_bandwidth_gb_s(double nodes, double clock_hz,
                           double bits_per_read = kDefaultBitsPerRead) noexcept;

struct HardwareSpec {
  std::string name;
  std::optional<double> mem_bandwidth_gb_s;
  /// Headline throughput (int8 / sparse class).
  std::optional<double> tops;
  /// Boolean-arithmetic throughput where one is published.
  std::optional<double> tops_bool;
  std::optional<double> process_nm;
  std::optional<double> power_idle_mw;
  std::optional<double> power_nominal_mw;
  std::optional<double> power_peak_mw;
  /// Row override of the memory bytes each op consumes.
  std::optional<double> bytes_per_op;
  /// Utilization the comparison table reports for this row, percent.
  std::optional<double> reported_utilization_pct;
  std::string source;
  /// Caveats on how the inputs were sourced; empty when none.
  std::string note;
};

/// Throws ConfigError if any known numeric field is not > 0.
void check_spec(const HardwareSpec& spec);

/// min(compute, bandwidth / bytes_per_op) / compute, in [0, 1].
/// Throws IncompleteSpec when bandwidth or tops are unknown.
double utilization(const HardwareSpec& spec, double bytes_per_op);
/// Uses the row's bytes_per_op override, else kDefaultBytesPerOp.
double utilization(const HardwareSpec& spec);

enum class CurrentCondition {
  DinVss,
  DinDvdd,
  DinQuarterClk,
  DinHalfClk,
};

struct CurrentLine {
  CurrentCondition condition;
  double slope_ma_per_mhz;
  double intercept_ma;
};

/// Whole-chip supply current against clock frequency, per input condition.
inline constexpr std::array<CurrentLine, 4> kCurrentLines{{
    {CurrentCondition::DinVss, 3.25, 6.3},
    {CurrentCondition::DinDvdd, 3.23, 6.4},
    {CurrentCondition::DinQuarterClk, 5.10, 6.4},
    {CurrentCondition::DinHalfClk, 6.95, 6.4},
}};

std::string_view condition_name(CurrentCondition c) noexcept;
/// Accepts DIN_VSS, DIN_DVDD, DIN_QTR_CLK, DIN_HALF_CLK. Throws ConfigError.
CurrentCondition parse_condition(std::string_view name);
const CurrentLine& current_line(CurrentCondition c) noexcept;

/// slope * freq + intercept, mA. Throws ContractError for negative freq.
double chip_current_ma(double freq_mhz, CurrentCondition c);

/// power / (nm^2 / 7^2): normalizes a power figure to a 7 nm process.
/// Throws ContractError for power < 0 or nm <= 0.
double adjusted_power_mw(double power_mw, double process_nm);

/// TOPS per watt. Throws ContractError for power <= 0.
double efficiency_tops_per_w(double tops, double power_w);
double adjusted_efficiency(double tops, double adjusted_power_w);

// --- dataset and report -----------------------------------------------------

/// Column order of the dataset file.
inline constexpr std::array<std::string_view, 11> kDatasetColumns{
    "name",          "bandwidth_gb_s",  "tops",          "tops_bool",
    "process_nm",    "power_idle_mw",   "power_nominal_mw", "power_peak_mw",
    "bytes_per_op",  "reported_utilization_pct", "source"};

/// Parses a dataset CSV. Blank and "?" cells are unknown. An optional
/// trailing `note` column is accepted. Throws ConfigError on malformed input.
std::vector<HardwareSpec> parse_dataset(std::string_view csv_text);
std::vector<HardwareSpec> load_dataset(const std::string& path);
/// The comparison dataset compiled into the library.
std::string_view shipped_dataset_csv() noexcept;
std::vector<HardwareSpec> shipped_dataset();

struct ReportOptions {
  /// When set, overrides every row's bytes_per_op.
  std::optional<double> bytes_per_op;
};

struct ReportRow {
  std::string name;
  std::optional<double> bandwidth_gb_s;
  std::optional<double> bytes_per_op;
  std::optional<double> utilization_pct;
  std::optional<double> tops;
  std::optional<double> tops_bool;
  std::optional<double> power_idle_mw;
  std::optional<double> power_nominal_mw;
  std::optional<double> power_peak_mw;
  std::optional<double> adj_idle_mw;
  std::optional<double> adj_nominal_mw;
  std::optional<double> adj_peak_mw;
  /// Efficiencies pair throughput with peak-workload power.
  std::optional<double> efficiency;
  std::optional<double> efficiency_bool;
  std::optional<double> adj_efficiency;
  std::optional<double> adj_efficiency_bool;
};

/// One row per spec, in input order. Cells whose inputs are unknown stay unknown.
std::vector<ReportRow> compare_report(std::span<const HardwareSpec> specs,
                                      const ReportOptions& options = {});

inline constexpr std::array<std::string_view, 16> kReportColumns{
    "name",           "bandwidth_gb_s", "bytes_per_op",     "utilization_pct",
    "tops",           "tops_bool",      "power_idle_mw",    "power_nominal_mw",
    "power_peak_mw",  "adj_idle_mw",    "adj_nominal_mw",   "adj_peak_mw",
    "efficiency_tops_w", "efficiency_bool_tops_w", "adj_efficiency", "adj_efficiency_bool"};

void write_report_csv(std::ostream& os, std::span<const ReportRow> rows);
void write_report_text(std::ostream& os, std::span<const ReportRow> rows);

// --- golden checks ----------------------------------------------------------

struct GoldenCheck {
  std::string name;
  double expected;
  double actual;
  double tolerance;
  bool passed;
};

/// Published figures re-derived from the model and the given dataset.
std::vector<GoldenCheck> run_golden_checks(std::span<const HardwareSpec> dataset);

}  // namespace nvtwin
