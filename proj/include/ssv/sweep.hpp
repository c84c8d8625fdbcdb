#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssv/block_structure.hpp"
#include "ssv/complex_matrix.hpp"
#include "ssv/lower_bound.hpp"
#include "ssv/upper_bound.hpp"

namespace ssv {

/// State-space model (A, B, C) defining M(i w) = C (i w I - A)^-1 B.
struct StateSpace {
    ComplexMatrix a;
    ComplexMatrix b;
    ComplexMatrix c;

    StateSpace(ComplexMatrix a_, ComplexMatrix b_, ComplexMatrix c_);

    std::size_t state_dim() const noexcept { return a.rows(); }
    std::size_t input_dim() const noexcept { return b.cols(); }
    std::size_t output_dim() const noexcept { return c.rows(); }

    /// True when every eigenvalue of A has negative real part. Violations
    /// are a warning, not an error: bounds stay computable pointwise in w.
    bool is_nominally_stable() const;
};

/// Frequency response C (i w I - A)^-1 B via a linear solve. Throws
/// std::domain_error naming w when i w I - A is singular.
ComplexMatrix freq_response(const StateSpace& ss, double omega);

enum class GridSigns { positive, negative, both };

/// Logarithmically spaced magnitudes in [omega_min_mag, omega_max_mag]
/// (count points). With GridSigns::both the mirrored negative grid is
/// prepended; the result is sorted ascending and never contains zero.
std::vector<double> make_grid(double omega_min_mag, double omega_max_mag, std::size_t count,
                              GridSigns signs);

enum class UpperMethod { method_of_centers, osborne, gen_osborne };
enum class LowerMethod { standard, generalized };

/// Method pairing defaults per structure: (generalized, method_of_centers)
/// for a repeated full-block, (standard, osborne) otherwise.
UpperMethod default_upper_method(const BlockStructure& structure);
LowerMethod default_lower_method(const BlockStructure& structure);

struct SweepConfig {
    MocConfig moc;
    PowerIterConfig power;
    std::optional<UpperMethod> upper;  ///< defaulted by structure when unset
    std::optional<LowerMethod> lower;
    std::size_t workers = 1;
    /// When set, initial power-iteration vectors are drawn from this seed
    /// (plus the grid index) instead of the SVD-based initialization.
    std::optional<unsigned> seed;
};

struct SweepRecord {
    double omega = 0.0;
    std::optional<double> alpha;
    std::optional<double> beta;
    double gap_percent = 0.0;
    bool converged_upper = false;
    bool converged_lower = false;
    double wall_time = 0.0;  ///< seconds; not serialized
    std::string error;       ///< nonempty when the point failed
};

struct SweepPeaks {
    double alpha_max = 0.0;
    double omega_at_alpha_max = 0.0;
    double beta_max = 0.0;
    double omega_at_beta_max = 0.0;
};

struct SweepTable {
    std::vector<SweepRecord> records;
    SweepPeaks peaks;
};

/// Bounds for a single matrix: Osborne-seeded initial vectors, the selected
/// lower-bound iteration, then the selected upper bound seeded with beta.
struct BoundReport {
    UpperBoundResult upper;
    LowerBoundResult lower;
    UpperMethod upper_method = UpperMethod::osborne;
    LowerMethod lower_method = LowerMethod::standard;
    double gap_percent = 0.0;
};

BoundReport bound_matrix(const ComplexMatrix& m, const BlockStructure& structure,
                         const SweepConfig& cfg = {}, std::optional<unsigned> point_seed = {});

/// Sweeps the grid; one record per frequency in grid order. Per-point
/// failures are recorded (absent bounds, error message) and the sweep
/// continues. Results are identical for any worker count.
SweepTable sweep_bounds(const StateSpace& ss, std::span<const double> grid,
                        const BlockStructure& structure, const SweepConfig& cfg = {});

/// Peak records (maxima over the table, ties broken by smallest omega).
/// Throws std::invalid_argument on an empty table.
SweepPeaks best_bounds(const SweepTable& table);

}  // namespace ssv
