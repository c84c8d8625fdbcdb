#include "ssv/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "ssv/detail/eigen_support.hpp"
#include "ssv/linalg.hpp"

namespace ssv {

namespace {

using detail::EigenMat;
using detail::EigenVec;

std::vector<Complex> seeded_unit_vector(std::size_t n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<Complex> v(n);
    double nrm2 = 0.0;
    for (auto& x : v) {
        x = Complex(dist(gen), dist(gen));
        nrm2 += std::norm(x);
    }
    const double nrm = std::sqrt(nrm2);
    for (auto& x : v) x /= nrm;
    return v;
}

void repeated_full_dims(const BlockStructure& structure, std::size_t& v, std::size_t& m1) {
    const auto& rf = std::get<RepeatedFullBlock>(structure.blocks().front());
    v = rf.v;
    m1 = rf.m1;
}

}  // namespace

StateSpace::StateSpace(ComplexMatrix a_, ComplexMatrix b_, ComplexMatrix c_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {
    if (a.empty() || !a.is_square()) {
        throw std::invalid_argument("StateSpace: A must be square and nonempty");
    }
    if (b.rows() != a.rows()) throw std::invalid_argument("StateSpace: B rows must match A");
    if (c.cols() != a.rows()) throw std::invalid_argument("StateSpace: C cols must match A");
}

bool StateSpace::is_nominally_stable() const {
    Eigen::ComplexEigenSolver<EigenMat> eig(detail::view(a), false);
    if (eig.info() != Eigen::Success) return false;
    return eig.eigenvalues().real().maxCoeff() < 0.0;
}

ComplexMatrix freq_response(const StateSpace& ss, double omega) {
    const Eigen::Index n = static_cast<Eigen::Index>(ss.state_dim());
    EigenMat shifted = -detail::view(ss.a);
    for (Eigen::Index k = 0; k < n; ++k) shifted(k, k) += Complex(0.0, omega);
    Eigen::FullPivLU<EigenMat> lu(shifted);
    if (!lu.isInvertible()) {
        throw std::domain_error("freq_response: i*omega*I - A is singular at omega = " +
                                std::to_string(omega));
    }
    const EigenMat x = lu.solve(detail::view(ss.b));
    return detail::from_eigen(detail::view(ss.c) * x);
}

std::vector<double> make_grid(double omega_min_mag, double omega_max_mag, std::size_t count,
                              GridSigns signs) {
    if (!(omega_min_mag > 0.0) || !(omega_max_mag >= omega_min_mag)) {
        throw std::invalid_argument("make_grid: need 0 < omega_min_mag <= omega_max_mag");
    }
    if (count < 1) throw std::invalid_argument("make_grid: count must be >= 1");

    std::vector<double> mags(count);
    if (count == 1) {
        mags[0] = omega_min_mag;
    } else {
        const double lg0 = std::log10(omega_min_mag);
        const double lg1 = std::log10(omega_max_mag);
        for (std::size_t k = 0; k < count; ++k) {
            mags[k] = std::pow(10.0, lg0 + (lg1 - lg0) * static_cast<double>(k) /
                                               static_cast<double>(count - 1));
        }
        mags.front() = omega_min_mag;
        mags.back() = omega_max_mag;
    }

    std::vector<double> grid;
    if (signs == GridSigns::negative || signs == GridSigns::both) {
        for (std::size_t k = count; k-- > 0;) grid.push_back(-mags[k]);
    }
    if (signs == GridSigns::positive || signs == GridSigns::both) {
        for (double m : mags) grid.push_back(m);
    }
    return grid;
}

UpperMethod default_upper_method(const BlockStructure& structure) {
    return structure.has_repeated_full() ? UpperMethod::method_of_centers : UpperMethod::osborne;
}

LowerMethod default_lower_method(const BlockStructure& structure) {
    return structure.has_repeated_full() ? LowerMethod::generalized : LowerMethod::standard;
}

BoundReport bound_matrix(const ComplexMatrix& m, const BlockStructure& structure,
                         const SweepConfig& cfg, std::optional<unsigned> point_seed) {
    if (structure.row_dim() != m.cols() || structure.col_dim() != m.rows()) {
        throw std::invalid_argument("bound_matrix: structure dimension does not match the matrix");
    }

    BoundReport report;
    report.upper_method = cfg.upper.value_or(default_upper_method(structure));
    report.lower_method = cfg.lower.value_or(default_lower_method(structure));

    const bool repeated = structure.has_repeated_full();
    if (report.lower_method == LowerMethod::generalized && !repeated) {
        throw std::invalid_argument(
            "bound_matrix: generalized lower bound requires a repeated full-block structure");
    }
    if (report.lower_method == LowerMethod::standard && repeated) {
        throw std::invalid_argument(
            "bound_matrix: standard lower bound requires a non-repeated structure");
    }
    if (report.upper_method == UpperMethod::method_of_centers && !repeated) {
        throw std::invalid_argument(
            "bound_matrix: method of centers requires a repeated full-block structure");
    }
    if (report.upper_method == UpperMethod::gen_osborne && !repeated) {
        throw std::invalid_argument(
            "bound_matrix: gen_osborne requires a repeated full-block structure");
    }
    if (report.upper_method == UpperMethod::osborne && repeated) {
        throw std::invalid_argument("bound_matrix: osborne requires a non-repeated structure");
    }

    // Osborne balancing over the diagonal (non-repeated) scaling set seeds the
    // power-iteration initial vectors and, for the non-repeated case, already
    // is the upper bound.
    std::optional<UpperBoundResult> osborne;
    if (m.is_square()) {
        osborne = osborne_balance(m, structure.scaling_block_dims());
    }

    std::vector<Complex> b0, w0;
    if (point_seed.has_value()) {
        b0 = seeded_unit_vector(m.cols(), *point_seed);
        w0 = seeded_unit_vector(m.cols(), *point_seed + 0x9e3779b9u);
    } else {
        auto init = init_vectors(m, osborne ? osborne->scaling : ComplexMatrix());
        b0 = std::move(init.first);
        w0 = std::move(init.second);
    }

    if (report.lower_method == LowerMethod::generalized) {
        std::size_t v = 0, m1 = 0;
        repeated_full_dims(structure, v, m1);
        report.lower = power_iteration_repeated_full(m, v, m1, b0, w0, cfg.power);
    } else {
        report.lower = power_iteration_standard(m, structure, b0, w0, cfg.power);
    }

    switch (report.upper_method) {
        case UpperMethod::osborne:
            report.upper = *osborne;
            break;
        case UpperMethod::method_of_centers: {
            std::size_t v = 0, m1 = 0;
            repeated_full_dims(structure, v, m1);
            report.upper = method_of_centers(m, v, m1, report.lower.beta, cfg.moc);
            break;
        }
        case UpperMethod::gen_osborne: {
            std::size_t v = 0, m1 = 0;
            repeated_full_dims(structure, v, m1);
            report.upper = gen_osborne(m, v, m1);
            break;
        }
    }

    report.gap_percent = report.upper.alpha > 0.0
                             ? 100.0 * (report.upper.alpha - report.lower.beta) / report.upper.alpha
                             : 0.0;
    return report;
}

SweepTable sweep_bounds(const StateSpace& ss, std::span<const double> grid,
                        const BlockStructure& structure, const SweepConfig& cfg) {
    SweepTable table;
    table.records.resize(grid.size());

    const auto run_point = [&](std::size_t idx) {
        SweepRecord& rec = table.records[idx];
        rec.omega = grid[idx];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const ComplexMatrix m = freq_response(ss, grid[idx]);
            std::optional<unsigned> point_seed;
            if (cfg.seed.has_value()) point_seed = *cfg.seed + static_cast<unsigned>(idx);
            const BoundReport rep = bound_matrix(m, structure, cfg, point_seed);
            rec.alpha = rep.upper.alpha;
            rec.beta = rep.lower.beta;
            rec.gap_percent = rep.gap_percent;
            rec.converged_upper = rep.upper.converged_by_ratio;
            rec.converged_lower = rep.lower.converged;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
    if (workers == 1 || grid.size() <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min(workers, grid.size());
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
                    run_point(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    if (!table.records.empty()) table.peaks = best_bounds(table);
    return table;
}

SweepPeaks best_bounds(const SweepTable& table) {
    if (table.records.empty()) throw std::invalid_argument("best_bounds: empty table");

    SweepPeaks peaks;
    bool have_alpha = false, have_beta = false;
    for (const SweepRecord& r : table.records) {
        if (r.alpha.has_value()) {
            if (!have_alpha || *r.alpha > peaks.alpha_max ||
                (*r.alpha == peaks.alpha_max && r.omega < peaks.omega_at_alpha_max)) {
                peaks.alpha_max = *r.alpha;
                peaks.omega_at_alpha_max = r.omega;
                have_alpha = true;
            }
        }
        if (r.beta.has_value()) {
            if (!have_beta || *r.beta > peaks.beta_max ||
                (*r.beta == peaks.beta_max && r.omega < peaks.omega_at_beta_max)) {
                peaks.beta_max = *r.beta;
                peaks.omega_at_beta_max = r.omega;
                have_beta = true;
            }
        }
    }
    return peaks;
}

}  // namespace ssv
