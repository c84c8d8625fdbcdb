#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ssv/block_structure.hpp"
#include "ssv/complex_matrix.hpp"

namespace ssv {

/// Settings shared by both power iterations.
struct PowerIterConfig {
    std::size_t max_cycles = 60;  ///< k_m
    /// Early stop once max(||b_{k+1}-b_k||, ||w_{k+1}-w_k||) < step_tol.
    /// Set to 0 to always run max_cycles.
    double step_tol = 1e-9;
    /// Certificate acceptance threshold on sigma_min(I - M Delta);
    /// negative selects the default 1e-6 * sigma_max(M).
    double residual_tol = -1.0;
    bool record_trajectory = false;
};

/// Iterate snapshot after a full update cycle; b and w have unit 2-norm.
struct PowerIterState {
    std::vector<Complex> a, z, b, w;
    double beta = 0.0;
    std::size_t iteration = 0;
};

/// Lower bound beta with its destabilizing-perturbation certificate.
///
/// Whenever beta > 0, perturbation.norm() * beta == 1 up to roundoff, so
/// checking sigma_min(I - M * perturbation) recovers the validity of the
/// bound independently of how it was found. residual stores that value for
/// the returned certificate. converged means the vector iteration reached
/// its fixed point (step_tol) and the returned certificate passes
/// residual_tol.
struct LowerBoundResult {
    double beta = 0.0;
    Perturbation perturbation;
    double residual = 0.0;
    bool converged = false;
    std::size_t iterations_used = 0;
    std::vector<double> beta_history;
    /// Certified candidate bounds considered (one per cycle that passed the
    /// residual test, plus any fallback), for diagnostics.
    std::vector<double> candidate_betas;
    std::vector<PowerIterState> trajectory;  ///< filled when record_trajectory
    bool used_fallback = false;
};

/// Initial vectors for the power iterations: b0 = w0 = right singular
/// vector of d_star * M * d_star^-1 (of M itself when d_star is empty).
/// d_star must be an invertible diagonal-style scaling of conforming size.
std::pair<std::vector<Complex>, std::vector<Complex>> init_vectors(
    const ComplexMatrix& m, const ComplexMatrix& d_star = {});

/// Power iteration for structures made of repeated scalars and full blocks.
/// b0 and w0 must have unit 2-norm and length matching the structure.
LowerBoundResult power_iteration_standard(const ComplexMatrix& m, const BlockStructure& structure,
                                          std::span<const Complex> b0,
                                          std::span<const Complex> w0,
                                          const PowerIterConfig& cfg = {});

/// Generalized power iteration for the repeated full-block structure
/// I_v (x) Delta1 with Delta1 of size m1 x n1, n1 = m.rows()/v (square when
/// M is square). M must have cols == v*m1.
LowerBoundResult power_iteration_repeated_full(const ComplexMatrix& m, std::size_t v,
                                               std::size_t m1, std::span<const Complex> b0,
                                               std::span<const Complex> w0,
                                               const PowerIterConfig& cfg = {});

/// Spectral-radius bound from the final iterate alignments: forms
/// Delta_a = I_v (x) Q(L(a) L(w)^H) and Delta_b = I_v (x) Q(L(w) L(a)^H)
/// and returns beta = max(rho(Delta_a^H M), rho(Delta_b M)) with the
/// achieving perturbation scaled to norm 1/beta. beta = 0 with an empty
/// perturbation when both spectral radii vanish.
std::pair<double, Perturbation> fallback_lower_bound(std::span<const Complex> a,
                                                     std::span<const Complex> w,
                                                     const ComplexMatrix& m, std::size_t v,
                                                     std::size_t m1);

}  // namespace ssv
