#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ssv/block_structure.hpp"
#include "ssv/complex_matrix.hpp"
#include "ssv/sweep.hpp"

namespace ssv::io {

/// Matrix JSON format: {"rows": n, "cols": m, "data": [[[re, im], ...], ...]}
/// with one inner array per row. Parsing reports the offending row/column.
ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

ComplexMatrix parse_matrix_file(const std::filesystem::path& path);

/// State-space file: {"A": <matrix>, "B": <matrix>, "C": <matrix>}.
StateSpace parse_state_space_file(const std::filesystem::path& path);

/// Structure spec, either a block list {"blocks": [...]} or a single-block
/// shorthand. Block objects: {"type": "repeated_scalar", "v": n},
/// {"type": "full", "dim": n}, {"type": "repeated_full", "v": n, "m1": n}.
BlockStructure structure_from_json(const nlohmann::json& j);
nlohmann::json structure_to_json(const BlockStructure& s);

/// Accepts inline JSON (text starting with '{') or a path to a JSON file.
BlockStructure parse_structure_spec(const std::string& spec);

nlohmann::json load_json_file(const std::filesystem::path& path);

/// CSV with header omega,alpha,beta,gap_percent,converged_upper,
/// converged_lower; 12 significant digits, '.' decimal, LF endings. Absent
/// bounds serialize as empty fields.
void write_sweep_csv(std::ostream& out, const SweepTable& table);
std::string sweep_csv_string(const SweepTable& table);

nlohmann::json peaks_to_json(const SweepPeaks& peaks);

/// Single-run report for the bound subcommand, including both certificates
/// and the certificate residual.
nlohmann::json bound_report_to_json(const ComplexMatrix& m, const BlockStructure& structure,
                                    const BoundReport& report);

/// Formats with 12 significant digits (the CSV convention).
std::string format_sig12(double x);

}  // namespace ssv::io
