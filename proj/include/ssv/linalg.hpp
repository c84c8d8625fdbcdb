#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssv/block_structure.hpp"
#include "ssv/complex_matrix.hpp"

namespace ssv {

/// Kronecker product S (x) I_{m1}: entry ((i*m1+a),(j*m1+b)) is S(i,j) when
/// a == b and zero otherwise. S must be square.
ComplexMatrix kron_identity(const ComplexMatrix& s, std::size_t m1);

/// Block-trace operator. Partitions the (v*m1) x (v*m1) matrix h into
/// m1 x m1 blocks and returns the v x v matrix of their traces. For m1 == 1
/// this is h itself.
ComplexMatrix block_trace(const ComplexMatrix& h, std::size_t v, std::size_t m1);

/// Restacks a vector of length v*m1 into an m1 x v matrix whose column j is
/// the j-th length-m1 segment. Exact inverse of unstack.
ComplexMatrix stack(std::span<const Complex> y, std::size_t m1);

/// Reads the columns of an m1 x v matrix back into a vector of length v*m1.
std::vector<Complex> unstack(const ComplexMatrix& stacked);

/// Alignment factor U1*V1^H from a truncated SVD of g, keeping singular
/// triplets with sigma > rank_tol * sigma_max. The result has unit spectral
/// norm for nonzero g. rank_tol < 0 selects the default
/// max(rows, cols) * machine-epsilon. Throws std::invalid_argument for an
/// all-zero g.
ComplexMatrix q_factor(const ComplexMatrix& g, double rank_tol = -1.0);

/// Largest singular value.
double sigma_max(const ComplexMatrix& m);

/// Smallest singular value.
double sigma_min(const ComplexMatrix& m);

/// Largest eigenvalue modulus; requires a square matrix.
double spectral_radius(const ComplexMatrix& m);

/// sigma_min(I - M * Delta). A value near zero certifies that I - M*Delta
/// is singular.
double singularity_residual(const ComplexMatrix& m, const Perturbation& delta);
double singularity_residual(const ComplexMatrix& m, const ComplexMatrix& delta_assembled);

/// Right singular vector (first column of V) associated with sigma_max,
/// normalized to unit 2-norm.
std::vector<Complex> right_singular_vector(const ComplexMatrix& m);

}  // namespace ssv
