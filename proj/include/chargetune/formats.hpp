#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "chargetune/band_bending.hpp"
#include "chargetune/fitting.hpp"

namespace chargetune {

inline constexpr int kSchemaVersion = 1;

/// Shortest round-tripping text for a double ("%.17g").
std::string format_number(double x);

/// Data CSV: optional "# key: value" comment lines (the first one is
/// "# schema_version: 1"), one header row, numeric rows.
struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Throws ParseError with the offending line number.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

PLTrace trace_from_table(const CsvTable& table);
CsvTable trace_to_table(const PLTrace& trace);

Spectrum spectrum_from_table(const CsvTable& table);
CsvTable spectrum_to_table(const Spectrum& spectrum);

std::vector<ScalingPoint> scaling_from_table(const CsvTable& table);
CsvTable scaling_to_table(const std::vector<ScalingPoint>& points);

/// rho_m, z_m, evac_eV, in_depletion for every diamond node.
CsvTable field_to_table(const PotentialField& field);

}  // namespace chargetune
