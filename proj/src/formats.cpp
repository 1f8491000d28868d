#include "chargetune/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "chargetune/errors.hpp"

namespace chargetune {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line) {
  if (cell.empty()) throw ParseError("empty numeric field", line);
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError("not a number: '" + cell + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value: '" + cell + "'", line);
  return v;
}

void check_schema(const std::string& value, std::size_t line) {
  const auto dot = value.find('.');
  const std::string major = value.substr(0, dot);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(major.data(), major.data() + major.size(), v);
  if (ec != std::errc() || ptr != major.data() + major.size()) {
    throw ParseError("malformed schema_version '" + value + "'", line);
  }
  if (v != kSchemaVersion) {
    throw ParseError("unsupported schema_version " + value + " (this build reads " +
                         std::to_string(kSchemaVersion) + ")",
                     line);
  }
}

}  // namespace

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("missing column '" + name + "'", 0);
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (have_header) continue;  // trailing comments are tolerated and dropped
      const auto colon = s.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(std::string_view(s).substr(1, colon - 1));
      const std::string value = trim(std::string_view(s).substr(colon + 1));
      if (key == "schema_version") check_schema(value, line);
      t.meta[key] = value;
      continue;
    }
    if (!have_header) {
      t.header = split(s);
      for (const auto& h : t.header) {
        if (h.empty()) throw ParseError("empty column name in header", line);
      }
      have_header = true;
      continue;
    }
    const auto cells = split(s);
    if (cells.size() != t.header.size()) {
      throw ParseError("expected " + std::to_string(t.header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       line);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, line));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("no header row", line);
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return parse_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  out << "# schema_version: " << kSchemaVersion << '\n';
  for (const auto& [k, v] : table.meta) {
    if (k != "schema_version") out << "# " << k << ": " << v << '\n';
  }
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
    out << '\n';
  }
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'", 0);
  write_csv(out, table);
}

PLTrace trace_from_table(const CsvTable& table) {
  PLTrace tr;
  tr.t_park_s = table.column_values("t_park_s");
  tr.counts_per_s = table.column_values("counts_per_s");
  if (table.has_column("sigma")) tr.sigma = table.column_values("sigma");
  return tr;
}

CsvTable trace_to_table(const PLTrace& trace) {
  CsvTable t;
  const bool with_sigma = !trace.sigma.empty();
  t.header = {"t_park_s", "counts_per_s"};
  if (with_sigma) t.header.push_back("sigma");
  for (std::size_t i = 0; i < trace.t_park_s.size(); ++i) {
    std::vector<double> r{trace.t_park_s[i], trace.counts_per_s[i]};
    if (with_sigma) r.push_back(trace.sigma[i]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

Spectrum spectrum_from_table(const CsvTable& table) {
  Spectrum s;
  s.wavelength_nm = table.column_values("wavelength_nm");
  s.counts = table.column_values("counts");
  if (auto it = table.meta.find("integration_time_s"); it != table.meta.end()) {
    s.integration_time_s = parse_number(it->second, 0);
  }
  if (auto it = table.meta.find("temperature_tag"); it != table.meta.end()) s.temperature_tag = it->second;
  return s;
}

CsvTable spectrum_to_table(const Spectrum& spectrum) {
  CsvTable t;
  t.meta["integration_time_s"] = format_number(spectrum.integration_time_s);
  if (!spectrum.temperature_tag.empty()) t.meta["temperature_tag"] = spectrum.temperature_tag;
  t.header = {"wavelength_nm", "counts"};
  for (std::size_t i = 0; i < spectrum.wavelength_nm.size(); ++i) {
    t.rows.push_back({spectrum.wavelength_nm[i], spectrum.counts[i]});
  }
  return t;
}

std::vector<ScalingPoint> scaling_from_table(const CsvTable& table) {
  const auto flux = table.column_values("flux");
  const auto k = table.column_values("k");
  std::vector<double> sigma;
  if (table.has_column("sigma_k")) sigma = table.column_values("sigma_k");
  std::vector<ScalingPoint> out;
  for (std::size_t i = 0; i < flux.size(); ++i) {
    out.push_back({flux[i], k[i], sigma.empty() ? 0.0 : sigma[i]});
  }
  return out;
}

CsvTable scaling_to_table(const std::vector<ScalingPoint>& points) {
  CsvTable t;
  const bool with_sigma = std::any_of(points.begin(), points.end(), [](const auto& p) { return p.sigma_k > 0.0; });
  t.header = {"flux", "k"};
  if (with_sigma) t.header.push_back("sigma_k");
  for (const auto& p : points) {
    std::vector<double> r{p.flux, p.k};
    if (with_sigma) r.push_back(p.sigma_k);
    t.rows.push_back(std::move(r));
  }
  return t;
}

CsvTable field_to_table(const PotentialField& field) {
  CsvTable t;
  t.meta["e_bb_eV"] = format_number(field.e_bb_eV());
  t.meta["n_rho"] = std::to_string(field.rho().size());
  t.meta["n_z"] = std::to_string(field.z().size());
  t.header = {"rho_m", "z_m", "evac_eV", "in_depletion"};
  for (int j = 0; j < field.n_z_nodes(); ++j) {
    for (int i = 0; i < field.n_rho_nodes(); ++i) {
      if (!field.is_diamond(i, j)) continue;
      t.rows.push_back({field.rho()[i], field.z()[j], field.evac(i, j), field.in_depletion(i, j) ? 1.0 : 0.0});
    }
  }
  return t;
}

}  // namespace chargetune
