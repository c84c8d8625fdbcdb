#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <vector>

#include "ssv/io.hpp"
#include "ssv/linalg.hpp"
#include "ssv/sweep.hpp"
#include "support/random_matrices.hpp"

using namespace ssv;
using testsupport::random_matrix;

namespace {

StateSpace minus_identity_model(std::size_t n) {
    return StateSpace(Complex(-1.0, 0.0) * ComplexMatrix::identity(n), ComplexMatrix::identity(n),
                      ComplexMatrix::identity(n));
}

/// Long-double Gaussian elimination solve of (i w I - A) X = B, then C X.
/// Independent of the production linear-solve path.
ComplexMatrix freq_response_longdouble(const StateSpace& ss, double omega) {
    using CL = std::complex<long double>;
    const std::size_t n = ss.state_dim();
    const std::size_t m = ss.input_dim();
    std::vector<std::vector<CL>> aug(n, std::vector<CL>(n + m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            CL v(-static_cast<long double>(ss.a(i, j).real()),
                 -static_cast<long double>(ss.a(i, j).imag()));
            if (i == j) v += CL(0.0L, static_cast<long double>(omega));
            aug[i][j] = v;
        }
        for (std::size_t j = 0; j < m; ++j) {
            aug[i][n + j] = CL(ss.b(i, j).real(), ss.b(i, j).imag());
        }
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
        }
        std::swap(aug[col], aug[piv]);
        const CL d = aug[col][col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const CL f = aug[r][col] / d;
            for (std::size_t j = col; j < n + m; ++j) aug[r][j] -= f * aug[col][j];
        }
    }
    std::vector<Complex> x(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const CL v = aug[i][n + j] / aug[i][i];
            x[i * m + j] = Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
        }
    }
    return ss.c * ComplexMatrix(n, m, std::move(x));
}

}  // namespace

TEST_CASE("freq_response closed-form cases") {
    const StateSpace ss = minus_identity_model(2);
    CHECK(max_abs_diff(freq_response(ss, 0.0), ComplexMatrix::identity(2)) < 1e-15);

    const ComplexMatrix m1 = freq_response(ss, 1.0);
    const ComplexMatrix expect =
        Complex(0.5, -0.5) * ComplexMatrix::identity(2);  // 1/(1+i) = (1-i)/2
    CHECK(max_abs_diff(m1, expect) < 1e-15);
}

TEST_CASE("freq_response matches a higher-precision solve on the shipped model") {
    const StateSpace ss = io::parse_state_space_file(std::string(SSV_DATA_DIR) +
                                                     "/academic_example.json");
    CHECK(ss.is_nominally_stable());
    for (double omega : {1.896, -0.37, 12.0}) {
        const ComplexMatrix fast = freq_response(ss, omega);
        const ComplexMatrix precise = freq_response_longdouble(ss, omega);
        CHECK(max_abs_diff(fast, precise) <= 1e-10 * (1.0 + precise.max_abs()));
    }
}

TEST_CASE("freq_response reports the singular frequency") {
    // A = diag(i): i*1*I - A singular at omega = 1
    const ComplexMatrix a(1, 1, {Complex(0.0, 1.0)});
    const StateSpace ss(a, ComplexMatrix::identity(1), ComplexMatrix::identity(1));
    CHECK_THROWS_AS(freq_response(ss, 1.0), std::domain_error);
    CHECK(!ss.is_nominally_stable());
}

TEST_CASE("make_grid examples") {
    const std::vector<double> g1 = make_grid(1.0, 100.0, 3, GridSigns::positive);
    REQUIRE(g1.size() == 3);
    CHECK(g1[0] == doctest::Approx(1.0));
    CHECK(g1[1] == doctest::Approx(10.0));
    CHECK(g1[2] == doctest::Approx(100.0));

    const std::vector<double> g2 = make_grid(1.0, 100.0, 3, GridSigns::both);
    REQUIRE(g2.size() == 6);
    CHECK(g2[0] == doctest::Approx(-100.0));
    CHECK(g2[1] == doctest::Approx(-10.0));
    CHECK(g2[2] == doctest::Approx(-1.0));
    CHECK(g2[3] == doctest::Approx(1.0));
    CHECK(g2[5] == doctest::Approx(100.0));
    for (std::size_t k = 0; k < 3; ++k) CHECK(g2[k] == -g2[5 - k]);  // exact mirror

    const double lo = std::pow(10.0, -0.5), hi = std::pow(10.0, 0.5);
    const std::vector<double> g3 = make_grid(lo, hi, 2, GridSigns::both);
    REQUIRE(g3.size() == 4);
    CHECK(g3[0] == doctest::Approx(-hi));
    CHECK(g3[1] == doctest::Approx(-lo));
    CHECK(g3[2] == doctest::Approx(lo));
    CHECK(g3[3] == doctest::Approx(hi));

    const std::vector<double> g4 = make_grid(0.5, 7.0, 1, GridSigns::negative);
    REQUIRE(g4.size() == 1);
    CHECK(g4[0] == -0.5);

    CHECK_THROWS_AS(make_grid(0.0, 1.0, 3, GridSigns::both), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(2.0, 1.0, 3, GridSigns::both), std::invalid_argument);
}

TEST_CASE("sweep on the identity model gives alpha = beta = 1") {
    const StateSpace ss = minus_identity_model(2);
    const std::vector<double> grid{0.0};
    const SweepTable table = sweep_bounds(ss, grid, BlockStructure::full(2), {});
    REQUIRE(table.records.size() == 1);
    REQUIRE(table.records[0].alpha.has_value());
    REQUIRE(table.records[0].beta.has_value());
    CHECK(*table.records[0].alpha == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(*table.records[0].beta == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(table.records[0].gap_percent == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(table.peaks.alpha_max == doctest::Approx(1.0));
}

TEST_CASE("conjugate symmetry of the response for real-valued models") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> dist;
    const auto real_matrix = [&](std::size_t n) {
        std::vector<Complex> e(n * n);
        for (auto& x : e) x = Complex(dist(gen), 0.0);
        return ComplexMatrix(n, n, std::move(e));
    };
    ComplexMatrix a = real_matrix(3);
    a = a - Complex(4.0, 0.0) * ComplexMatrix::identity(3);  // push spectrum left
    const StateSpace ss(a, real_matrix(3), real_matrix(3));
    for (double omega : {0.3, 2.5}) {
        const ComplexMatrix plus = freq_response(ss, omega);
        const ComplexMatrix minus = freq_response(ss, -omega);
        CHECK(max_abs_diff(minus, plus.conjugate()) < 1e-12);
    }
}

TEST_CASE("sweep pairing compatibility checks") {
    const ComplexMatrix m = random_matrix(4, 4, 5);
    SweepConfig cfg;
    cfg.lower = LowerMethod::generalized;
    CHECK_THROWS_AS(bound_matrix(m, BlockStructure::full(4), cfg), std::invalid_argument);
    cfg.lower = LowerMethod::standard;
    CHECK_THROWS_AS(bound_matrix(m, BlockStructure::repeated_full(2, 2), cfg),
                    std::invalid_argument);
    cfg.lower.reset();
    cfg.upper = UpperMethod::osborne;
    CHECK_THROWS_AS(bound_matrix(m, BlockStructure::repeated_full(2, 2), cfg),
                    std::invalid_argument);
    cfg.upper = UpperMethod::method_of_centers;
    CHECK_THROWS_AS(bound_matrix(m, BlockStructure::full(4), cfg), std::invalid_argument);

    // structure dimension mismatch is rejected before any solve
    CHECK_THROWS_AS(bound_matrix(m, BlockStructure::full(3), SweepConfig{}),
                    std::invalid_argument);
}

TEST_CASE("bound_matrix default pairings") {
    const ComplexMatrix m = random_matrix(4, 4, 15);

    const BoundReport nr = bound_matrix(m, BlockStructure::full(4), {});
    CHECK(nr.upper_method == UpperMethod::osborne);
    CHECK(nr.lower_method == LowerMethod::standard);
    CHECK(nr.upper.alpha >= nr.lower.beta - 1e-8);

    const BoundReport rep = bound_matrix(m, BlockStructure::repeated_full(2, 2), {});
    CHECK(rep.upper_method == UpperMethod::method_of_centers);
    CHECK(rep.lower_method == LowerMethod::generalized);
    CHECK(rep.upper.alpha >= rep.lower.beta - 1e-8);

    SweepConfig gcfg;
    gcfg.upper = UpperMethod::gen_osborne;
    const BoundReport gen = bound_matrix(m, BlockStructure::repeated_full(2, 2), gcfg);
    CHECK(gen.upper.alpha >= rep.upper.alpha - 1e-8 * rep.upper.alpha);
}

TEST_CASE("sweep determinism across worker counts") {
    const StateSpace ss = io::parse_state_space_file(std::string(SSV_DATA_DIR) +
                                                     "/academic_example.json");
    const std::vector<double> grid = make_grid(0.1, 10.0, 8, GridSigns::both);
    const BlockStructure structure = BlockStructure::repeated_full(2, 2);

    SweepConfig cfg1;
    cfg1.workers = 1;
    SweepConfig cfg4 = cfg1;
    cfg4.workers = 4;

    const SweepTable t1 = sweep_bounds(ss, grid, structure, cfg1);
    const std::string csv1 = io::sweep_csv_string(t1);
    const std::string csv4 = io::sweep_csv_string(sweep_bounds(ss, grid, structure, cfg4));
    CHECK(csv1 == csv4);
    CHECK(csv1.find("omega,alpha,beta,gap_percent,converged_upper,converged_lower\n") == 0);

    // per-record sandwich and the unconditional sigma_max ceiling on beta
    for (const SweepRecord& r : t1.records) {
        REQUIRE(r.alpha.has_value());
        REQUIRE(r.beta.has_value());
        CHECK(*r.alpha >= *r.beta - 1e-8 * std::max(*r.alpha, 1.0));
        const double smax = sigma_max(freq_response(ss, r.omega));
        CHECK(*r.beta <= smax + 1e-8 * smax);
    }
}

TEST_CASE("best_bounds picks maxima with smallest-omega ties") {
    SweepTable table;
    CHECK_THROWS_AS(best_bounds(table), std::invalid_argument);

    SweepRecord r1;
    r1.omega = -1.0;
    r1.alpha = 1.0;
    r1.beta = 0.9;
    SweepRecord r2;
    r2.omega = 0.0;
    r2.alpha = 5.0;
    r2.beta = 4.5;
    SweepRecord r3;
    r3.omega = 1.0;
    r3.alpha = 2.0;
    r3.beta = 4.5;
    table.records = {r1, r2, r3};
    const SweepPeaks peaks = best_bounds(table);
    CHECK(peaks.alpha_max == 5.0);
    CHECK(peaks.omega_at_alpha_max == 0.0);
    CHECK(peaks.beta_max == 4.5);
    CHECK(peaks.omega_at_beta_max == 0.0);  // tie at 4.5 resolved to smaller omega

    SweepTable single;
    single.records = {r1};
    const SweepPeaks sp = best_bounds(single);
    CHECK(sp.alpha_max == 1.0);
    CHECK(sp.omega_at_alpha_max == -1.0);
}

TEST_CASE("per-point failures do not abort the sweep") {
    const ComplexMatrix a(1, 1, {Complex(0.0, 1.0)});
    const StateSpace ss(a, ComplexMatrix::identity(1), ComplexMatrix::identity(1));
    const std::vector<double> grid{0.5, 1.0, 2.0};  // singular at omega = 1
    const SweepTable table = sweep_bounds(ss, grid, BlockStructure::full(1), {});
    REQUIRE(table.records.size() == 3);
    CHECK(table.records[0].alpha.has_value());
    CHECK(!table.records[1].alpha.has_value());
    CHECK(!table.records[1].error.empty());
    CHECK(table.records[2].alpha.has_value());
}
