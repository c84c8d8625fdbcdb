#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ssv/detail/eigen_support.hpp"
#include "ssv/linalg.hpp"
#include "ssv/lower_bound.hpp"
#include "ssv/upper_bound.hpp"
#include "support/random_matrices.hpp"

using namespace ssv;
using testsupport::random_matrix;
using testsupport::random_unit_vector;

namespace {

double vec_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const Complex& x : v) s += std::norm(x);
    return std::sqrt(s);
}

double vec_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(a[k] - b[k]);
    return std::sqrt(s);
}

void check_certificate(const ComplexMatrix& m, const LowerBoundResult& r) {
    REQUIRE(r.beta > 0.0);
    REQUIRE(!r.perturbation.empty());
    CHECK(std::abs(r.perturbation.norm() * r.beta - 1.0) <= 1e-10);
    CHECK(r.residual == doctest::Approx(singularity_residual(m, r.perturbation)).epsilon(1e-9));
    if (r.converged) CHECK(r.residual <= 1e-6 * sigma_max(m));
}

}  // namespace

TEST_CASE("init_vectors picks the dominant right singular direction") {
    const ComplexMatrix d15 = ComplexMatrix::diagonal(std::vector<double>{1.0, 5.0});
    auto [b0, w0] = init_vectors(d15);
    CHECK(std::abs(std::abs(b0[1]) - 1.0) < 1e-12);
    CHECK(std::abs(b0[0]) < 1e-12);
    CHECK(b0 == w0);

    auto [bi, wi] = init_vectors(ComplexMatrix::identity(3));
    CHECK(vec_norm(bi) == doctest::Approx(1.0).epsilon(1e-12));

    // with an Osborne scaling, equals the right singular vector of the
    // balanced matrix (computed independently here)
    const ComplexMatrix m = random_matrix(4, 4, 11);
    const std::vector<std::size_t> dims{1, 1, 1, 1};
    const UpperBoundResult osb = osborne_balance(m, dims);
    auto [b1, w1] = init_vectors(m, osb.scaling);
    Eigen::FullPivLU<detail::EigenMat> lu(detail::view(osb.scaling));
    const ComplexMatrix balanced =
        detail::from_eigen(detail::view(osb.scaling) * detail::view(m) * lu.inverse());
    const std::vector<Complex> expect = right_singular_vector(balanced);
    // same direction up to a unit phase
    Complex inner(0, 0);
    for (std::size_t k = 0; k < b1.size(); ++k) inner += std::conj(expect[k]) * b1[k];
    CHECK(std::abs(std::abs(inner) - 1.0) < 1e-10);

    CHECK_THROWS_AS(init_vectors(m, ComplexMatrix::zero(4, 4)), std::invalid_argument);
}

TEST_CASE("standard power iteration: repeated scalar reaches the spectral radius") {
    const ComplexMatrix m = ComplexMatrix::diagonal(std::vector<double>{2.0, 3.0});
    auto [b0, w0] = init_vectors(m);
    const LowerBoundResult r =
        power_iteration_standard(m, BlockStructure::repeated_scalar(2), b0, w0);
    CHECK(r.beta == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(r.converged);
    check_certificate(m, r);
}

TEST_CASE("standard power iteration: full block reaches sigma_max") {
    for (unsigned seed : {21u, 22u, 23u}) {
        const ComplexMatrix m = random_matrix(4, 4, seed);
        auto [b0, w0] = init_vectors(m);
        PowerIterConfig cfg;
        cfg.max_cycles = 200;
        const LowerBoundResult r =
            power_iteration_standard(m, BlockStructure::full(4), b0, w0, cfg);
        CHECK(r.beta == doctest::Approx(sigma_max(m)).epsilon(1e-8));
        check_certificate(m, r);
    }
}

TEST_CASE("standard power iteration: defective repeated-scalar case") {
    // rho = 1 with a Jordan block; the certified bound must still reach 1
    const ComplexMatrix m(2, 2, {1.0, 10.0, 0.0, 1.0});
    auto [b0, w0] = init_vectors(m);
    PowerIterConfig cfg;
    cfg.max_cycles = 400;
    cfg.residual_tol = 1e-8;
    const LowerBoundResult r =
        power_iteration_standard(m, BlockStructure::repeated_scalar(2), b0, w0, cfg);
    CHECK(r.beta == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.beta <= 1.0 + 1e-9);  // never above mu = rho
    check_certificate(m, r);
    CHECK(r.residual <= 1e-8);
}

TEST_CASE("standard power iteration on a mixed structure") {
    const ComplexMatrix m = random_matrix(5, 5, 31);
    const BlockStructure s({Block{RepeatedScalar{2}}, Block{FullBlock{3}}});
    auto [b0, w0] = init_vectors(m);
    PowerIterConfig cfg;
    cfg.max_cycles = 300;
    const LowerBoundResult r = power_iteration_standard(m, s, b0, w0, cfg);
    CHECK(r.beta > 0.0);
    CHECK(r.beta <= sigma_max(m) + 1e-8);
    check_certificate(m, r);

    // unit norms after every cycle
    PowerIterConfig tcfg = cfg;
    tcfg.record_trajectory = true;
    const LowerBoundResult rt = power_iteration_standard(m, s, b0, w0, tcfg);
    for (const PowerIterState& st : rt.trajectory) {
        CHECK(std::abs(vec_norm(st.b) - 1.0) <= 1e-12);
        CHECK(std::abs(vec_norm(st.w) - 1.0) <= 1e-12);
    }
}

TEST_CASE("zero matrix yields beta = 0 without a certificate") {
    const ComplexMatrix z = ComplexMatrix::zero(3, 3);
    const std::vector<Complex> e1{1.0, 0.0, 0.0};
    const LowerBoundResult r = power_iteration_standard(z, BlockStructure::full(3), e1, e1);
    CHECK(r.beta == 0.0);
    CHECK(!r.converged);
    CHECK(r.perturbation.empty());
}

TEST_CASE("generalized power iteration special cases") {
    // v = 1: single full block, beta -> sigma_max
    for (unsigned seed : {41u, 42u}) {
        const ComplexMatrix m = random_matrix(4, 4, seed);
        auto [b0, w0] = init_vectors(m);
        PowerIterConfig cfg;
        cfg.max_cycles = 200;
        const LowerBoundResult r = power_iteration_repeated_full(m, 1, 4, b0, w0, cfg);
        CHECK(r.beta == doctest::Approx(sigma_max(m)).epsilon(1e-8));
        check_certificate(m, r);
    }

    // m1 = 1: scalar repeated v times, beta -> rho
    for (unsigned seed : {43u, 44u}) {
        const ComplexMatrix m = random_matrix(4, 4, seed);
        auto [b0, w0] = init_vectors(m);
        PowerIterConfig cfg;
        cfg.max_cycles = 500;
        const LowerBoundResult r = power_iteration_repeated_full(m, 4, 1, b0, w0, cfg);
        CHECK(r.beta == doctest::Approx(spectral_radius(m)).epsilon(1e-8));
        check_certificate(m, r);
    }

    // identity fixed point: beta = 1, Delta = I, residual = 0
    const ComplexMatrix id4 = ComplexMatrix::identity(4);
    const std::vector<Complex> b0 = random_unit_vector(4, 45);
    const LowerBoundResult r = power_iteration_repeated_full(id4, 2, 2, b0, b0);
    CHECK(r.beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs_diff(r.perturbation.assembled(), id4) < 1e-10);
    CHECK(r.residual < 1e-10);
    CHECK(r.converged);
}

TEST_CASE("generalized power iteration on generic repeated blocks") {
    for (unsigned seed : {51u, 52u, 53u, 54u}) {
        const std::size_t v = 3, m1 = 2;
        const ComplexMatrix m = random_matrix(v * m1, v * m1, seed);
        auto [b0, w0] = init_vectors(m);
        PowerIterConfig cfg;
        cfg.max_cycles = 200;
        const LowerBoundResult r = power_iteration_repeated_full(m, v, m1, b0, w0, cfg);
        CHECK(r.beta > 0.0);
        check_certificate(m, r);

        // subset monotonicity against the non-repeated Osborne upper bound
        const std::vector<std::size_t> dims(v, m1);
        const UpperBoundResult osb = osborne_balance(m, dims);
        CHECK(r.beta <= osb.alpha + 1e-8);
        CHECK(r.beta <= sigma_max(m) + 1e-8);
    }
}

TEST_CASE("generalized iteration with rectangular repeated blocks") {
    // Delta1 is 2x3, repeated twice: M is 6x4
    const std::size_t v = 2, m1 = 2, n1 = 3;
    const ComplexMatrix m = random_matrix(v * n1, v * m1, 57);
    auto [b0, w0] = init_vectors(m);
    PowerIterConfig cfg;
    cfg.max_cycles = 300;
    const LowerBoundResult r = power_iteration_repeated_full(m, v, m1, b0, w0, cfg);
    CHECK(r.beta > 0.0);
    CHECK(r.perturbation.assembled().rows() == v * m1);
    CHECK(r.perturbation.assembled().cols() == v * n1);
    check_certificate(m, r);
    CHECK(r.beta <= sigma_max(m) + 1e-8);
}

TEST_CASE("reduction equivalence of the generalized iteration") {
    // v = 1 reproduces the full-block trajectory
    {
        const ComplexMatrix m = random_matrix(4, 4, 61);
        const std::vector<Complex> b0 = random_unit_vector(4, 161);
        const std::vector<Complex> w0 = random_unit_vector(4, 162);
        PowerIterConfig cfg;
        cfg.max_cycles = 10;
        cfg.step_tol = 0.0;
        cfg.record_trajectory = true;
        const LowerBoundResult std_r =
            power_iteration_standard(m, BlockStructure::full(4), b0, w0, cfg);
        const LowerBoundResult gen_r = power_iteration_repeated_full(m, 1, 4, b0, w0, cfg);
        REQUIRE(std_r.trajectory.size() == gen_r.trajectory.size());
        for (std::size_t k = 0; k < std_r.trajectory.size(); ++k) {
            CHECK(vec_diff(std_r.trajectory[k].a, gen_r.trajectory[k].a) < 1e-12);
            CHECK(vec_diff(std_r.trajectory[k].z, gen_r.trajectory[k].z) < 1e-12);
            CHECK(vec_diff(std_r.trajectory[k].b, gen_r.trajectory[k].b) < 1e-12);
            CHECK(vec_diff(std_r.trajectory[k].w, gen_r.trajectory[k].w) < 1e-12);
        }
    }
    // m1 = 1 reproduces the repeated-scalar trajectory
    {
        const ComplexMatrix m = random_matrix(4, 4, 63);
        const std::vector<Complex> b0 = random_unit_vector(4, 163);
        const std::vector<Complex> w0 = random_unit_vector(4, 164);
        PowerIterConfig cfg;
        cfg.max_cycles = 10;
        cfg.step_tol = 0.0;
        cfg.record_trajectory = true;
        const LowerBoundResult std_r =
            power_iteration_standard(m, BlockStructure::repeated_scalar(4), b0, w0, cfg);
        const LowerBoundResult gen_r = power_iteration_repeated_full(m, 4, 1, b0, w0, cfg);
        REQUIRE(std_r.trajectory.size() == gen_r.trajectory.size());
        for (std::size_t k = 0; k < std_r.trajectory.size(); ++k) {
            CHECK(vec_diff(std_r.trajectory[k].z, gen_r.trajectory[k].z) < 1e-12);
            CHECK(vec_diff(std_r.trajectory[k].b, gen_r.trajectory[k].b) < 1e-12);
        }
    }
}

TEST_CASE("fallback_lower_bound") {
    // identity with aligned vectors certifies beta = 1
    const ComplexMatrix id4 = ComplexMatrix::identity(4);
    const std::vector<Complex> e1{1.0, 0.0, 0.0, 0.0};
    auto [beta, pert] = fallback_lower_bound(e1, e1, id4, 2, 2);
    CHECK(beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(singularity_residual(id4, pert) < 1e-10);

    // arbitrary non-converged vectors still give an exactly certified bound
    const ComplexMatrix m = random_matrix(6, 6, 71);
    const std::vector<Complex> a = random_unit_vector(6, 171);
    const std::vector<Complex> w = random_unit_vector(6, 172);
    auto [beta2, pert2] = fallback_lower_bound(a, w, m, 3, 2);
    CHECK(beta2 > 0.0);
    CHECK(std::abs(pert2.norm() * beta2 - 1.0) <= 1e-10);
    CHECK(singularity_residual(m, pert2) <= 1e-6);

    // v = 1 with a = Mw/||Mw||: at least the Rayleigh quotient of M at w
    const ComplexMatrix m4 = random_matrix(4, 4, 73);
    const std::vector<Complex> wv = random_unit_vector(4, 173);
    detail::EigenVec we = detail::to_eigen_vector(wv);
    detail::EigenVec mw = detail::view(m4) * we;
    mw /= mw.norm();
    const std::vector<Complex> av = detail::from_eigen_vector(mw);
    auto [beta3, pert3] = fallback_lower_bound(av, wv, m4, 1, 4);
    const double rayleigh = std::abs(we.dot(detail::view(m4) * we));
    CHECK(beta3 >= rayleigh - 1e-10);
}

TEST_CASE("beta history and candidates are recorded") {
    const ComplexMatrix m = random_matrix(6, 6, 81);
    auto [b0, w0] = init_vectors(m);
    PowerIterConfig cfg;
    cfg.max_cycles = 200;
    const LowerBoundResult r = power_iteration_repeated_full(m, 3, 2, b0, w0, cfg);
    CHECK(r.beta_history.size() == r.iterations_used);
    if (r.used_fallback) {
        CHECK(r.beta > 0.0);
    } else {
        REQUIRE(!r.candidate_betas.empty());
        double best = 0.0;
        for (double cb : r.candidate_betas) best = std::max(best, cb);
        CHECK(best >= r.beta - 1e-9);  // reported beta is the best surviving candidate
    }
}
