// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/perfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nvtwin/csv.hpp"
#include "nvtwin/errors.hpp"

namespace nvtwin {

double peak_bandwidth_gib_s(double nodes, double clock_hz, double bits_per_read) noexcept {
  return nodes * clock_hz * bits_per_read / 8.0 / 1024.0 / 1024.0 / 1024.0;
}

double peak_bandwidth_gb_s(double nodes, double clock_hz, double bits_per_read) noexcept {
  return nodes * clock_hz * bits_per_read / 8.0 / 1e9;
}

void check_spec(const HardwareSpec& s) {
  auto positive = [&](const std::optional<double>& v, const char* field) {
    if (v && !(*v > 0.0)) throw ConfigError(s.name + ": " + field + " must be > 0");
  };
  positive(s.mem_bandwidth_gb_s, "bandwidth_gb_s");
  positive(s.tops, "tops");
  positive(s.tops_bool, "tops_bool");
  positive(s.process_nm, "process_nm");
  positive(s.power_idle_mw, "power_idle_mw");
  positive(s.power_nominal_mw, "power_nominal_mw");
  positive(s.power_peak_mw, "power_peak_mw");
  positive(s.bytes_per_op, "bytes_per_op");
}

double utilization(const HardwareSpec& spec, double bytes_per_op) {
  if (!spec.mem_bandwidth_gb_s || !spec.tops) {
    throw IncompleteSpec(spec.name + ": utilization needs both bandwidth and tops");
  }
  if (!(bytes_per_op > 0.0)) throw ContractError("bytes_per_op must be > 0");
  check_spec(spec);
  const double compute_tops = *spec.tops;
  const double supported_tops = *spec.mem_bandwidth_gb_s * 1e9 / bytes_per_op / 1e12;
  return std::min(compute_tops, supported_tops) / compute_tops;
}

double utilization(const HardwareSpec& spec) {
  return utilization(spec, spec.bytes_per_op.value_or(kDefaultBytesPerOp));
}

std::string_view condition_name(CurrentCondition c) noexcept {
  switch (c) {
    case CurrentCondition::DinVss: return "DIN_VSS";
    case CurrentCondition::DinDvdd: return "DIN_DVDD";
    case CurrentCondition::DinQuarterClk: return "DIN_QTR_CLK";
    case CurrentCondition::DinHalfClk: return "DIN_HALF_CLK";
  }
  return "UNKNOWN";
}

CurrentCondition parse_condition(std::string_view name) {
  for (const auto& line : kCurrentLines) {
    if (condition_name(line.condition) == name) return line.condition;
  }
  throw ConfigError("unknown DIN condition '" + std::string(name) +
                    "' (expected DIN_VSS, DIN_DVDD, DIN_QTR_CLK or DIN_HALF_CLK)");
}

const CurrentLine& current_line(CurrentCondition c) noexcept {
  return kCurrentLines[static_cast<std::size_t>(c)];
}

double chip_current_ma(double freq_mhz, CurrentCondition c) {
  if (!(freq_mhz >= 0.0)) throw ContractError("frequency must be >= 0");
  const auto& line = current_line(c);
  return line.slope_ma_per_mhz * freq_mhz + line.intercept_ma;
}

double adjusted_power_mw(double power_mw, double process_nm) {
  if (!(power_mw >= 0.0) || !(process_nm > 0.0)) {
    throw ContractError("adjusted_power needs power >= 0 and process_nm > 0");
  }
  if (process_nm == kReferenceProcessNm) return power_mw;
  return power_mw / (process_nm * process_nm / (kReferenceProcessNm * kReferenceProcessNm));
}

double efficiency_tops_per_w(double tops, double power_w) {
  if (!(power_w > 0.0)) throw ContractError("efficiency needs power > 0");
  return tops / power_w;
}

double adjusted_efficiency(double tops, double adjusted_power_w) {
  return efficiency_tops_per_w(tops, adjusted_power_w);
}

namespace {

std::optional<double> parse_cell(std::string_view raw, const std::string& where) {
  const auto s = csv::trim(raw);
  if (s.empty() || s == "?") return std::nullopt;
  const std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) {
    throw ConfigError(where + ": '" + buf + "' is not a number");
  }
  return v;
}

}  // namespace

std::vector<HardwareSpec> parse_dataset(std::string_view csv_text) {
  const auto rows = csv::parse(csv_text);
  std::vector<HardwareSpec> out;
  if (rows.empty()) return out;

  const auto& header = rows.front();
  const bool has_note = header.size() == kDatasetColumns.size() + 1;
  if (header.size() < kDatasetColumns.size() || header.size() > kDatasetColumns.size() + 1) {
    throw ConfigError("dataset header has " + std::to_string(header.size()) + " columns, expected " +
                      std::to_string(kDatasetColumns.size()) + " (+ optional note)");
  }
  for (std::size_t i = 0; i < kDatasetColumns.size(); ++i) {
    if (csv::trim(header[i]) != kDatasetColumns[i]) {
      throw ConfigError("dataset column " + std::to_string(i + 1) + " must be '" +
                        std::string(kDatasetColumns[i]) + "'");
    }
  }
  if (has_note && csv::trim(header.back()) != "note") {
    throw ConfigError("dataset trailing column must be 'note'");
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw ConfigError("dataset row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                        " fields, expected " + std::to_string(header.size()));
    }
    const std::string where = "dataset row " + std::to_string(r + 1);
    HardwareSpec s;
    s.name = std::string(csv::trim(row[0]));
    s.mem_bandwidth_gb_s = parse_cell(row[1], where);
    s.tops = parse_cell(row[2], where);
    s.tops_bool = parse_cell(row[3], where);
    s.process_nm = parse_cell(row[4], where);
    s.power_idle_mw = parse_cell(row[5], where);
    s.power_nominal_mw = parse_cell(row[6], where);
    s.power_peak_mw = parse_cell(row[7], where);
    s.bytes_per_op = parse_cell(row[8], where);
    s.reported_utilization_pct = parse_cell(row[9], where);
    s.source = row[10];
    if (has_note) s.note = row[11];
    check_spec(s);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<HardwareSpec> load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str());
}

std::vector<HardwareSpec> shipped_dataset() { return parse_dataset(shipped_dataset_csv()); }

std::vector<ReportRow> compare_report(std::span<const HardwareSpec> specs, const ReportOptions& options) {
  std::vector<ReportRow> rows;
  rows.reserve(specs.size());
  for (const auto& s : specs) {
    ReportRow r;
    r.name = s.name;
    r.bandwidth_gb_s = s.mem_bandwidth_gb_s;
    r.bytes_per_op = options.bytes_per_op ? options.bytes_per_op : s.bytes_per_op.value_or(kDefaultBytesPerOp);
    if (s.mem_bandwidth_gb_s && s.tops) r.utilization_pct = utilization(s, *r.bytes_per_op) * 100.0;
    r.tops = s.tops;
    r.tops_bool = s.tops_bool;
    r.power_idle_mw = s.power_idle_mw;
    r.power_nominal_mw = s.power_nominal_mw;
    r.power_peak_mw = s.power_peak_mw;
    if (s.process_nm) {
      if (s.power_idle_mw) r.adj_idle_mw = adjusted_power_mw(*s.power_idle_mw, *s.process_nm);
      if (s.power_nominal_mw) r.adj_nominal_mw = adjusted_power_mw(*s.power_nominal_mw, *s.process_nm);
      if (s.power_peak_mw) r.adj_peak_mw = adjusted_power_mw(*s.power_peak_mw, *s.process_nm);
    }
    if (s.power_peak_mw) {
      if (s.tops) r.efficiency = efficiency_tops_per_w(*s.tops, *s.power_peak_mw / 1000.0);
      if (s.tops_bool) r.efficiency_bool = efficiency_tops_per_w(*s.tops_bool, *s.power_peak_mw / 1000.0);
    }
    if (r.adj_peak_mw) {
      if (s.tops) r.adj_efficiency = adjusted_efficiency(*s.tops, *r.adj_peak_mw / 1000.0);
      if (s.tops_bool) r.adj_efficiency_bool = adjusted_efficiency(*s.tops_bool, *r.adj_peak_mw / 1000.0);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::vector<std::optional<double>> numeric_cells(const ReportRow& r) {
  return {r.bandwidth_gb_s, r.bytes_per_op,     r.utilization_pct, r.tops,         r.tops_bool,
          r.power_idle_mw,  r.power_nominal_mw, r.power_peak_mw,   r.adj_idle_mw,  r.adj_nominal_mw,
          r.adj_peak_mw,    r.efficiency,       r.efficiency_bool, r.adj_efficiency, r.adj_efficiency_bool};
}

std::string short_number(const std::optional<double>& v) {
  if (!v) return "?";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& os, std::span<const ReportRow> rows) {
  csv::Row header(kReportColumns.begin(), kReportColumns.end());
  csv::write_row(os, header);
  for (const auto& r : rows) {
    csv::Row line{r.name};
    for (const auto& c : numeric_cells(r)) line.push_back(csv::format_optional(c));
    csv::write_row(os, line);
  }
}

void write_report_text(std::ostream& os, std::span<const ReportRow> rows) {
  std::vector<std::vector<std::string>> table;
  table.emplace_back(kReportColumns.begin(), kReportColumns.end());
  for (const auto& r : rows) {
    std::vector<std::string> line{r.name};
    for (const auto& c : numeric_cells(r)) line.push_back(short_number(c));
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> width(kReportColumns.size(), 0);
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i == 0) {
        os << line[i] << std::string(width[i] - line[i].size(), ' ');
      } else {
        os << "  " << std::string(width[i] - line[i].size(), ' ') << line[i];
      }
    }
    os << '\n';
  }
  os << "bandwidth in decimal GB/s; utilization = min(tops, bandwidth/bytes_per_op)/tops; "
        "adjusted power normalized to 7 nm by nm^2/49; efficiencies use peak power\n";
}

namespace {

const HardwareSpec* find_row(std::span<const HardwareSpec> dataset, std::string_view prefix) {
  for (const auto& s : dataset) {
    if (s.name.starts_with(prefix)) return &s;
  }
  return nullptr;
}

GoldenCheck check(std::string name, double expected, double actual, double tol) {
  const bool ok = std::isfinite(actual) && std::abs(actual - expected) <= tol;
  return {std::move(name), expected, actual, tol, ok};
}

double utilization_pct_of(std::span<const HardwareSpec> dataset, std::string_view prefix) {
  const auto* row = find_row(dataset, prefix);
  if (row == nullptr || !row->mem_bandwidth_gb_s || !row->tops) return std::numeric_limits<double>::quiet_NaN();
  return utilization(*row) * 100.0;
}

}  // namespace

std::vector<GoldenCheck> run_golden_checks(std::span<const HardwareSpec> dataset) {
  std::vector<GoldenCheck> out;
  out.push_back(check("peak bandwidth, 3200 nodes x 50 MHz x 24 bit [GB/s, /1024^3]", 447.0,
                      peak_bandwidth_gib_s(3200, 50e6), 0.5));
  out.push_back(check("16-chip bandwidth [TB/s, 16 x 447.03 / 1000]", 7.2,
                      16.0 * peak_bandwidth_gib_s(3200, 50e6) / 1000.0, 0.05));
  out.push_back(check("utilization NVIDIA H100 [%]", 0.03, utilization_pct_of(dataset, "NVIDIA H100"), 0.005));
  out.push_back(check("utilization NV1 single chip [%]", 100.0,
                      utilization_pct_of(dataset, "Non-Von NV1 (1 chip)"), 0.0));
  out.push_back(check("utilization Cerebras [%]", 100.0, utilization_pct_of(dataset, "Cerebras"), 0.0));
  for (const auto& line : kCurrentLines) {
    const std::string cond(condition_name(line.condition));
    const double expected_intercept = line.condition == CurrentCondition::DinVss ? 6.3 : 6.4;
    out.push_back(check("current at 0 MHz, " + cond + " [mA]", expected_intercept,
                        chip_current_ma(0.0, line.condition), 0.0));
  }
  constexpr std::array<double, 4> kSlopes{3.25, 3.23, 5.10, 6.95};
  for (std::size_t i = 0; i < kCurrentLines.size(); ++i) {
    const auto c = kCurrentLines[i].condition;
    out.push_back(check("current slope, " + std::string(condition_name(c)) + " [mA/MHz]", kSlopes[i],
                        (chip_current_ma(50.0, c) - chip_current_ma(0.0, c)) / 50.0, 1e-9));
  }
  out.push_back(check("adjusted power 243 mW @ 28 nm [mW]", 15.0, adjusted_power_mw(243.0, 28.0), 0.5));
  out.push_back(check("adjusted power 20348 mW @ 12 nm [mW]", 6924.0, adjusted_power_mw(20348.0, 12.0), 5.0));
  out.push_back(check("adjusted power identity @ 7 nm [mW]", 243.0, adjusted_power_mw(243.0, 7.0), 0.0));
  return out;
}

}  // namespace nvtwin
