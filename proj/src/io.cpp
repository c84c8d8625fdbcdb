#include "ssv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ssv::io {

using nlohmann::json;

namespace {

double number_at(const json& j, const std::string& context) {
    if (!j.is_number()) throw std::invalid_argument(context + ": expected a number");
    return j.get<double>();
}

std::size_t positive_int_at(const json& j, const std::string& context) {
    if (!j.is_number_unsigned() || j.get<std::size_t>() == 0) {
        throw std::invalid_argument(context + ": expected a positive integer");
    }
    return j.get<std::size_t>();
}

}  // namespace

ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
        throw std::invalid_argument("matrix: expected an object with rows, cols and data");
    }
    const std::size_t rows = positive_int_at(j.at("rows"), "matrix rows");
    const std::size_t cols = positive_int_at(j.at("cols"), "matrix cols");
    const json& data = j.at("data");
    if (!data.is_array() || data.size() != rows) {
        throw std::invalid_argument("matrix: row count mismatch (data has " +
                                    std::to_string(data.size()) + " rows, header says " +
                                    std::to_string(rows) + ")");
    }
    std::vector<Complex> entries;
    entries.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = data.at(i);
        if (!row.is_array() || row.size() != cols) {
            throw std::invalid_argument("matrix: row length mismatch at row " + std::to_string(i));
        }
        for (std::size_t k = 0; k < cols; ++k) {
            const json& cell = row.at(k);
            if (!cell.is_array() || cell.size() != 2) {
                throw std::invalid_argument("matrix: entry (" + std::to_string(i) + "," +
                                            std::to_string(k) + ") must be a [re, im] pair");
            }
            const std::string ctx =
                "matrix entry (" + std::to_string(i) + "," + std::to_string(k) + ")";
            const double re = number_at(cell.at(0), ctx);
            const double im = number_at(cell.at(1), ctx);
            if (!std::isfinite(re) || !std::isfinite(im)) {
                throw std::invalid_argument(ctx + ": non-finite value");
            }
            entries.emplace_back(re, im);
        }
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

json matrix_to_json(const ComplexMatrix& m) {
    json data = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) {
            row.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
        }
        data.push_back(std::move(row));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open file: " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

ComplexMatrix parse_matrix_file(const std::filesystem::path& path) {
    try {
        return matrix_from_json(load_json_file(path));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

StateSpace parse_state_space_file(const std::filesystem::path& path) {
    const json j = load_json_file(path);
    try {
        if (!j.is_object() || !j.contains("A") || !j.contains("B") || !j.contains("C")) {
            throw std::invalid_argument("state space: expected an object with A, B and C");
        }
        return StateSpace(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                          matrix_from_json(j.at("C")));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

namespace {

Block block_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) {
        throw std::invalid_argument("structure block: expected an object with a type");
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "repeated_scalar") {
        return RepeatedScalar{positive_int_at(j.at("v"), "repeated_scalar v")};
    }
    if (type == "full") {
        return FullBlock{positive_int_at(j.at("dim"), "full dim")};
    }
    if (type == "repeated_full") {
        const std::size_t v = positive_int_at(j.at("v"), "repeated_full v");
        const std::size_t m1 = positive_int_at(j.at("m1"), "repeated_full m1");
        return RepeatedFullBlock{v, m1, m1};
    }
    throw std::invalid_argument("structure block: unknown type '" + type + "'");
}

}  // namespace

BlockStructure structure_from_json(const json& j) {
    if (j.is_object() && j.contains("blocks")) {
        const json& blocks = j.at("blocks");
        if (!blocks.is_array() || blocks.empty()) {
            throw std::invalid_argument("structure: blocks must be a nonempty array");
        }
        std::vector<Block> parsed;
        parsed.reserve(blocks.size());
        for (const json& b : blocks) parsed.push_back(block_from_json(b));
        return BlockStructure(std::move(parsed));
    }
    return BlockStructure({block_from_json(j)});
}

json structure_to_json(const BlockStructure& s) {
    json blocks = json::array();
    for (const Block& b : s.blocks()) {
        if (std::holds_alternative<RepeatedScalar>(b)) {
            blocks.push_back(json{{"type", "repeated_scalar"}, {"v", std::get<RepeatedScalar>(b).v}});
        } else if (std::holds_alternative<FullBlock>(b)) {
            blocks.push_back(json{{"type", "full"}, {"dim", std::get<FullBlock>(b).dim}});
        } else {
            const auto& rf = std::get<RepeatedFullBlock>(b);
            blocks.push_back(json{{"type", "repeated_full"}, {"v", rf.v}, {"m1", rf.m1}});
        }
    }
    return json{{"blocks", std::move(blocks)}};
}

BlockStructure parse_structure_spec(const std::string& spec) {
    const std::size_t first = spec.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && spec[first] == '{') {
        try {
            return structure_from_json(json::parse(spec));
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(std::string("structure spec: ") + e.what());
        }
    }
    return structure_from_json(load_json_file(spec));
}

std::string format_sig12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    out << "omega,alpha,beta,gap_percent,converged_upper,converged_lower\n";
    for (const SweepRecord& r : table.records) {
        out << format_sig12(r.omega) << ',';
        if (r.alpha.has_value()) out << format_sig12(*r.alpha);
        out << ',';
        if (r.beta.has_value()) out << format_sig12(*r.beta);
        out << ',';
        if (r.alpha.has_value() && r.beta.has_value()) out << format_sig12(r.gap_percent);
        out << ',' << (r.converged_upper ? "true" : "false") << ','
            << (r.converged_lower ? "true" : "false") << '\n';
    }
}

std::string sweep_csv_string(const SweepTable& table) {
    std::ostringstream out;
    write_sweep_csv(out, table);
    return out.str();
}

json peaks_to_json(const SweepPeaks& peaks) {
    return json{{"alpha_max", peaks.alpha_max},
                {"omega_at_alpha_max", peaks.omega_at_alpha_max},
                {"beta_max", peaks.beta_max},
                {"omega_at_beta_max", peaks.omega_at_beta_max}};
}

namespace {

const char* upper_method_name(UpperMethod m) {
    switch (m) {
        case UpperMethod::method_of_centers: return "moc";
        case UpperMethod::osborne: return "osborne";
        case UpperMethod::gen_osborne: return "genosborne";
    }
    return "?";
}

const char* lower_method_name(LowerMethod m) {
    return m == LowerMethod::standard ? "standard" : "generalized";
}

}  // namespace

json bound_report_to_json(const ComplexMatrix& m, const BlockStructure& structure,
                          const BoundReport& report) {
    json upper{{"method", upper_method_name(report.upper_method)},
               {"alpha", report.upper.alpha},
               {"converged", report.upper.converged_by_ratio},
               {"iterations", report.upper.iterations_used},
               {"alpha_history", report.upper.alpha_history},
               {"scaling", matrix_to_json(report.upper.scaling)}};
    if (!report.upper.r_matrix.empty()) upper["r"] = matrix_to_json(report.upper.r_matrix);

    json lower{{"method", lower_method_name(report.lower_method)},
               {"beta", report.lower.beta},
               {"converged", report.lower.converged},
               {"iterations", report.lower.iterations_used},
               {"residual", report.lower.residual},
               {"beta_history", report.lower.beta_history},
               {"used_fallback", report.lower.used_fallback}};
    if (!report.lower.perturbation.empty()) {
        lower["perturbation"] = matrix_to_json(report.lower.perturbation.assembled());
        lower["perturbation_norm"] = report.lower.perturbation.norm();
    }

    return json{{"rows", m.rows()},
                {"cols", m.cols()},
                {"structure", structure_to_json(structure)},
                {"alpha", report.upper.alpha},
                {"beta", report.lower.beta},
                {"gap_percent", report.gap_percent},
                {"upper", std::move(upper)},
                {"lower", std::move(lower)}};
}

}  // namespace ssv::io
