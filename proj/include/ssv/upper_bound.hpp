#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssv/complex_matrix.hpp"

namespace ssv {

/// Parameters of the method-of-centers solver.
struct MocConfig {
    double ratio_threshold = 1.05;       ///< p: stop once alpha/beta < p
    std::size_t max_outer = 500;         ///< k_m
    double theta = 1e-3;                 ///< level-update blend, in (0,1)
    double gamma = 1e6;                  ///< condition bound on R, > 1
    double epsilon = 2e-4;               ///< initial lambda offset, > 0
    std::size_t inner_steps = 2;         ///< gradient steps per outer iteration
    double linesearch_delta0 = 1.0;      ///< first trial step
    double linesearch_shrink = 0.5;      ///< backtracking factor, in (0,1)
    std::size_t linesearch_max_backtracks = 40;

    void validate() const;
};

struct LineSearchParams {
    double delta0 = 1.0;
    double shrink = 0.5;
    std::size_t max_backtracks = 40;
};

/// Upper bound alpha with its scaling certificate.
///
/// alpha equals sigma_max(scaling * M * scaling^-1) for the matrix it was
/// computed from. r_matrix is the small Hermitian R with
/// scaling = (R (x) I)^{1/2} in the repeated full-block solvers, empty
/// otherwise. converged_by_ratio reports the solver's own stopping rule:
/// the alpha/beta < p test for method_of_centers, the Frobenius-change
/// tolerance for osborne_balance and gen_osborne.
struct UpperBoundResult {
    double alpha = 0.0;
    ComplexMatrix scaling;
    ComplexMatrix r_matrix;
    bool converged_by_ratio = false;
    std::size_t iterations_used = 0;
    std::vector<double> alpha_history;
    /// Squared Frobenius norm after each sweep (Osborne) or each accepted
    /// off-diagonal update (GenOsborne); empty for method_of_centers.
    std::vector<double> fro_history;
    /// Scaling indices clamped to 1 because a zero row/column block sum made
    /// the optimal value degenerate.
    std::vector<std::size_t> clamped_indices;
};

/// Osborne balancing over diagonal scalings diag(d_1 I, ..., d_v I) with the
/// given block sizes. Sweeps update one d_i at a time with the closed-form
/// per-coordinate minimizer of the squared Frobenius norm and stop when the
/// norm change falls below tol (relative) or after max_sweeps.
UpperBoundResult osborne_balance(const ComplexMatrix& m, std::span<const std::size_t> block_dims,
                                 std::size_t max_sweeps = 200, double tol = 1e-12);

/// log-det barrier J(R) = -log det L1 - log det L2 - log det L3 at level
/// lambda, where L1 = lambda^2 (R (x) I) - M^H (R (x) I) M, L2 = gamma I - R
/// and L3 = R - gamma^-1 I. Throws std::domain_error naming the first
/// constraint that is not positive definite.
double barrier_value(const ComplexMatrix& m, const ComplexMatrix& r, double lambda, double gamma,
                     std::size_t v, std::size_t m1);

/// Gradient of the barrier with respect to R:
///   Phi_R = Gamma(M L1^-1 M^H) - lambda^2 Gamma(L1^-1) + L2^-1 - L3^-1,
/// Hermitized as (Phi + Phi^H)/2. Throws std::domain_error naming the first
/// constraint that fails positive definiteness.
ComplexMatrix barrier_gradient(const ComplexMatrix& m, const ComplexMatrix& r, double lambda,
                               double gamma, std::size_t v, std::size_t m1);

/// Backtracking step size: the largest delta in the schedule
/// delta0 * shrink^j such that R - delta*Phi keeps L1, L2, L3 positive
/// definite and strictly decreases the barrier. Returns 0 when no trial
/// step qualifies.
double line_search(const ComplexMatrix& r, const ComplexMatrix& phi, double lambda, double gamma,
                   const ComplexMatrix& m, std::size_t v, std::size_t m1,
                   const LineSearchParams& params = {});

/// Method-of-centers upper bound for the repeated full-block structure
/// I_v (x) Delta1. beta is the current lower bound used by the stopping
/// ratio (pass 0 to run all max_outer iterations). When r_init is empty the
/// solver starts from the squared Osborne scalings; a user-provided r_init
/// must be Hermitian and strictly feasible, otherwise std::domain_error.
/// Returns the smallest alpha seen over all iterates with its certificate.
UpperBoundResult method_of_centers(const ComplexMatrix& m, std::size_t v, std::size_t m1,
                                   double beta, const MocConfig& cfg = {},
                                   const ComplexMatrix& r_init = {});

/// Coefficients of the quartic f1(s) = ||D_ij M D_ij^-1||_F^2 in the single
/// off-diagonal scaling entry s:
///   f1 = c0 + c1 s + conj(c1 s) + c2 |s|^2 + c3 s^2 + conj(c3 s^2)
///        + c4 s^2 conj(s) + conj(c4) s conj(s)^2 + c5 |s^2|^2.
/// c0, c2, c5 are real by construction.
struct OffdiagCoeffs {
    double c0 = 0.0;
    Complex c1;
    double c2 = 0.0;
    Complex c3;
    Complex c4;
    double c5 = 0.0;

    /// Evaluates f1 at s (real by construction; the real part is returned).
    double evaluate(const Complex& s) const;
};

/// Quartic coefficients for the ordered pair (i, j), 0-based, i != j < v.
OffdiagCoeffs offdiag_coeffs(const ComplexMatrix& m_k, std::size_t i, std::size_t j, std::size_t v,
                             std::size_t m1);

/// Minimizes the real form of the quartic from (0, 0) with a damped,
/// regularized Newton method. The result is accepted only if it does not
/// increase the objective; otherwise returns 0.
Complex damped_newton_quartic(const OffdiagCoeffs& coeffs);

/// GenOsborne upper bound: Osborne balancing followed by one pass (or more)
/// of single-entry off-diagonal scaling updates, each minimized as a
/// quartic. Square repeated blocks only.
UpperBoundResult gen_osborne(const ComplexMatrix& m, std::size_t v, std::size_t m1,
                             std::size_t passes = 1);

}  // namespace ssv
