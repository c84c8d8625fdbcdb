#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ssv/io.hpp"
#include "ssv/linalg.hpp"
#include "ssv/sweep.hpp"

namespace {

struct SolverFlags {
    std::string structure_spec;
    std::string upper;
    std::string lower;
    double p = 1.05;
    double gamma = 1e6;
    double theta = 1e-3;
    double eps = 2e-4;
    std::size_t max_iters = 500;
    std::size_t power_iters = 60;
    std::optional<unsigned> seed;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--structure", f.structure_spec,
                    "Uncertainty structure: inline JSON or a path to a JSON file")
        ->required();
    cmd->add_option("--upper", f.upper, "Upper-bound method: moc|osborne|genosborne")
        ->check(CLI::IsMember({"moc", "osborne", "genosborne"}));
    cmd->add_option("--lower", f.lower, "Lower-bound method: standard|generalized")
        ->check(CLI::IsMember({"standard", "generalized"}));
    cmd->add_option("--p", f.p, "Upper/lower ratio stopping threshold (> 1)");
    cmd->add_option("--gamma", f.gamma, "Condition bound on the scaling matrix R");
    cmd->add_option("--theta", f.theta, "Method-of-centers level blend, in (0,1)");
    cmd->add_option("--eps", f.eps, "Initial level offset");
    cmd->add_option("--max-iters", f.max_iters, "Method-of-centers outer iteration cap");
    cmd->add_option("--power-iters", f.power_iters, "Power iteration cycle cap");
    cmd->add_option("--seed", f.seed,
                    "Use seeded random initial vectors instead of the SVD-based default");
}

ssv::SweepConfig make_config(const SolverFlags& f) {
    ssv::SweepConfig cfg;
    cfg.moc.ratio_threshold = f.p;
    cfg.moc.gamma = f.gamma;
    cfg.moc.theta = f.theta;
    cfg.moc.epsilon = f.eps;
    cfg.moc.max_outer = f.max_iters;
    cfg.power.max_cycles = f.power_iters;
    cfg.seed = f.seed;
    if (f.upper == "moc") cfg.upper = ssv::UpperMethod::method_of_centers;
    if (f.upper == "osborne") cfg.upper = ssv::UpperMethod::osborne;
    if (f.upper == "genosborne") cfg.upper = ssv::UpperMethod::gen_osborne;
    if (f.lower == "standard") cfg.lower = ssv::LowerMethod::standard;
    if (f.lower == "generalized") cfg.lower = ssv::LowerMethod::generalized;
    cfg.moc.validate();
    return cfg;
}

int run_bound(const SolverFlags& flags, const std::string& matrix_path,
              const std::string& out_path) {
    const ssv::ComplexMatrix m = ssv::io::parse_matrix_file(matrix_path);
    const ssv::BlockStructure structure = ssv::io::parse_structure_spec(flags.structure_spec);
    const ssv::SweepConfig cfg = make_config(flags);

    std::optional<unsigned> point_seed;
    if (flags.seed.has_value()) point_seed = *flags.seed;
    const ssv::BoundReport report = ssv::bound_matrix(m, structure, cfg, point_seed);

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 1;
    }
    out << ssv::io::bound_report_to_json(m, structure, report).dump(2) << "\n";

    std::cout << "alpha=" << ssv::io::format_sig12(report.upper.alpha)
              << " beta=" << ssv::io::format_sig12(report.lower.beta)
              << " gap=" << ssv::io::format_sig12(report.gap_percent) << "%"
              << " report=" << out_path << "\n";

    const bool converged = report.lower.converged && report.upper.converged_by_ratio;
    return converged ? 0 : 2;
}

int run_sweep(const SolverFlags& flags, const std::string& model_path, double omega_min,
              double omega_max, std::size_t omega_count, const std::string& omega_signs,
              std::size_t workers, const std::string& out_prefix) {
    const ssv::StateSpace ss = ssv::io::parse_state_space_file(model_path);
    const ssv::BlockStructure structure = ssv::io::parse_structure_spec(flags.structure_spec);
    ssv::SweepConfig cfg = make_config(flags);
    cfg.workers = workers;

    if (!ss.is_nominally_stable()) {
        std::cerr << "warning: A has eigenvalues with nonnegative real part; "
                     "bounds are still computed pointwise in omega\n";
    }

    ssv::GridSigns signs = ssv::GridSigns::both;
    if (omega_signs == "pos") signs = ssv::GridSigns::positive;
    if (omega_signs == "neg") signs = ssv::GridSigns::negative;
    const std::vector<double> grid = ssv::make_grid(omega_min, omega_max, omega_count, signs);

    const ssv::SweepTable table = ssv::sweep_bounds(ss, grid, structure, cfg);

    std::string csv_path = out_prefix;
    std::string peaks_path;
    if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv") {
        peaks_path = csv_path.substr(0, csv_path.size() - 4) + ".peaks.json";
    } else {
        peaks_path = csv_path + ".peaks.json";
        csv_path += ".csv";
    }

    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
        std::cerr << "error: cannot write " << csv_path << "\n";
        return 1;
    }
    ssv::io::write_sweep_csv(csv, table);

    std::ofstream peaks(peaks_path);
    if (!peaks) {
        std::cerr << "error: cannot write " << peaks_path << "\n";
        return 1;
    }
    peaks << ssv::io::peaks_to_json(table.peaks).dump(2) << "\n";

    bool any_failed = false;
    for (const auto& r : table.records) {
        if (!r.error.empty()) {
            std::cerr << "warning: omega=" << r.omega << " failed: " << r.error << "\n";
            any_failed = true;
        }
        if (!r.alpha.has_value() || !r.beta.has_value()) any_failed = true;
    }

    std::cout << "points=" << table.records.size()
              << " alpha_max=" << ssv::io::format_sig12(table.peaks.alpha_max)
              << " at omega=" << ssv::io::format_sig12(table.peaks.omega_at_alpha_max)
              << " beta_max=" << ssv::io::format_sig12(table.peaks.beta_max)
              << " at omega=" << ssv::io::format_sig12(table.peaks.omega_at_beta_max)
              << " csv=" << csv_path << "\n";

    return any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified upper/lower bounds on the structured singular value"};
    app.require_subcommand(1);

    SolverFlags bound_flags, sweep_flags;
    std::string matrix_path, model_path;
    std::string bound_out = "ssv_bound.json";
    std::string sweep_out = "ssv_sweep";
    double omega_min = 0.0, omega_max = 0.0;
    std::size_t omega_count = 100;
    std::string omega_signs = "both";
    std::size_t workers = 1;

    CLI::App* bound = app.add_subcommand("bound", "Bounds for a single complex matrix");
    bound->add_option("--matrix", matrix_path, "Matrix JSON file")->required();
    add_solver_flags(bound, bound_flags);
    bound->add_option("--out", bound_out, "Report path (JSON)");

    CLI::App* sweep = app.add_subcommand("sweep", "Bounds over a frequency grid of an LTI model");
    sweep->add_option("--model", model_path, "State-space JSON file with A, B, C")->required();
    add_solver_flags(sweep, sweep_flags);
    sweep->add_option("--omega-min", omega_min, "Smallest frequency magnitude (> 0)")->required();
    sweep->add_option("--omega-max", omega_max, "Largest frequency magnitude")->required();
    sweep->add_option("--omega-count", omega_count, "Points per sign of the grid");
    sweep->add_option("--omega-signs", omega_signs, "pos|neg|both")
        ->check(CLI::IsMember({"pos", "neg", "both"}));
    sweep->add_option("--workers", workers, "Worker threads for the sweep");
    sweep->add_option("--out", sweep_out, "Output prefix (writes <out>.csv and <out>.peaks.json)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bound->parsed()) return run_bound(bound_flags, matrix_path, bound_out);
        return run_sweep(sweep_flags, model_path, omega_min, omega_max, omega_count, omega_signs,
                         workers, sweep_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
