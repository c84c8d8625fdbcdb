#include "ssv/linalg.hpp"

#include <limits>
#include <stdexcept>

#include "ssv/detail/eigen_support.hpp"

namespace ssv {

ComplexMatrix kron_identity(const ComplexMatrix& s, std::size_t m1) {
    if (!s.is_square() || s.empty()) {
        throw std::invalid_argument("kron_identity: S must be square and nonempty");
    }
    if (m1 < 1) throw std::invalid_argument("kron_identity: m1 must be >= 1");
    const std::size_t v = s.rows();
    const std::size_t n = v * m1;
    std::vector<Complex> e(n * n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = 0; j < v; ++j)
            for (std::size_t a = 0; a < m1; ++a) e[(i * m1 + a) * n + (j * m1 + a)] = s(i, j);
    return ComplexMatrix(n, n, std::move(e));
}

ComplexMatrix block_trace(const ComplexMatrix& h, std::size_t v, std::size_t m1) {
    if (!h.is_square() || h.rows() != v * m1) {
        throw std::invalid_argument("block_trace: H must be square with dimension v*m1");
    }
    std::vector<Complex> e(v * v);
    for (std::size_t i = 0; i < v; ++i) {
        for (std::size_t j = 0; j < v; ++j) {
            Complex t(0.0, 0.0);
            for (std::size_t a = 0; a < m1; ++a) t += h(i * m1 + a, j * m1 + a);
            e[i * v + j] = t;
        }
    }
    return ComplexMatrix(v, v, std::move(e));
}

ComplexMatrix stack(std::span<const Complex> y, std::size_t m1) {
    if (m1 < 1 || y.size() % m1 != 0) {
        throw std::invalid_argument("stack: vector length must be a positive multiple of m1");
    }
    const std::size_t v = y.size() / m1;
    std::vector<Complex> e(y.size());
    for (std::size_t j = 0; j < v; ++j)
        for (std::size_t a = 0; a < m1; ++a) e[a * v + j] = y[j * m1 + a];
    return ComplexMatrix(m1, v, std::move(e));
}

std::vector<Complex> unstack(const ComplexMatrix& stacked) {
    const std::size_t m1 = stacked.rows();
    const std::size_t v = stacked.cols();
    std::vector<Complex> y(m1 * v);
    for (std::size_t j = 0; j < v; ++j)
        for (std::size_t a = 0; a < m1; ++a) y[j * m1 + a] = stacked(a, j);
    return y;
}

ComplexMatrix q_factor(const ComplexMatrix& g, double rank_tol) {
    if (g.empty()) throw std::invalid_argument("q_factor: empty matrix");
    if (rank_tol < 0.0) {
        rank_tol = static_cast<double>(std::max(g.rows(), g.cols())) *
                   std::numeric_limits<double>::epsilon();
    }
    const detail::Svd s = detail::svd(detail::view(g));
    const double smax = s.sigma.size() > 0 ? s.sigma(0) : 0.0;
    if (smax == 0.0) {
        throw std::invalid_argument("q_factor: zero matrix has no alignment direction");
    }
    Eigen::Index rank = 0;
    while (rank < s.sigma.size() && s.sigma(rank) > rank_tol * smax) ++rank;
    const detail::EigenMat q = s.u.leftCols(rank) * s.v.leftCols(rank).adjoint();
    return detail::from_eigen(q);
}

double sigma_max(const ComplexMatrix& m) {
    if (m.empty()) throw std::invalid_argument("sigma_max: empty matrix");
    return detail::svd(detail::view(m)).sigma(0);
}

double sigma_min(const ComplexMatrix& m) {
    if (m.empty()) throw std::invalid_argument("sigma_min: empty matrix");
    const auto sig = detail::svd(detail::view(m)).sigma;
    return sig(sig.size() - 1);
}

double spectral_radius(const ComplexMatrix& m) {
    if (!m.is_square() || m.empty()) {
        throw std::invalid_argument("spectral_radius: square nonempty matrix required");
    }
    Eigen::ComplexEigenSolver<detail::EigenMat> eig(detail::view(m), false);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("spectral_radius: eigenvalue iteration failed");
    }
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double singularity_residual(const ComplexMatrix& m, const ComplexMatrix& delta_assembled) {
    if (m.cols() != delta_assembled.rows() || m.rows() != delta_assembled.cols()) {
        throw std::invalid_argument("singularity_residual: dimension mismatch between M and Delta");
    }
    const detail::EigenMat md = detail::view(m) * detail::view(delta_assembled);
    const detail::EigenMat r = detail::EigenMat::Identity(md.rows(), md.cols()) - md;
    const auto sig = detail::svd(r).sigma;
    return sig(sig.size() - 1);
}

double singularity_residual(const ComplexMatrix& m, const Perturbation& delta) {
    return singularity_residual(m, delta.assembled());
}

std::vector<Complex> right_singular_vector(const ComplexMatrix& m) {
    if (m.empty()) throw std::invalid_argument("right_singular_vector: empty matrix");
    const detail::Svd s = detail::svd(detail::view(m));
    detail::EigenVec v = s.v.col(0);
    v /= v.norm();
    return detail::from_eigen_vector(v);
}

}  // namespace ssv
