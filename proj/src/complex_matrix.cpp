#include "ssv/complex_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "ssv/detail/eigen_support.hpp"

namespace ssv {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) {
        throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    }
    if (entries_.size() != rows_ * cols_) {
        throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
    }
    for (const Complex& e : entries_) {
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
            throw std::invalid_argument("ComplexMatrix: non-finite entry");
        }
    }
}

ComplexMatrix ComplexMatrix::zero(std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols, std::vector<Complex>(rows * cols, Complex(0.0, 0.0)));
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    std::vector<Complex> e(n * n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = Complex(1.0, 0.0);
    return ComplexMatrix(n, n, std::move(e));
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
    const std::size_t n = diag.size();
    std::vector<Complex> e(n * n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = diag[i];
    return ComplexMatrix(n, n, std::move(e));
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
    std::vector<Complex> d(diag.begin(), diag.end());
    return diagonal(d);
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> values) {
    return ComplexMatrix(values.size(), 1, std::vector<Complex>(values.begin(), values.end()));
}

ComplexMatrix ComplexMatrix::transpose() const {
    std::vector<Complex> e(entries_.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) e[j * rows_ + i] = (*this)(i, j);
    return ComplexMatrix(cols_, rows_, std::move(e));
}

ComplexMatrix ComplexMatrix::conjugate() const {
    std::vector<Complex> e(entries_.size());
    for (std::size_t k = 0; k < entries_.size(); ++k) e[k] = std::conj(entries_[k]);
    return ComplexMatrix(rows_, cols_, std::move(e));
}

ComplexMatrix ComplexMatrix::adjoint() const {
    std::vector<Complex> e(entries_.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) e[j * rows_ + i] = std::conj((*this)(i, j));
    return ComplexMatrix(cols_, rows_, std::move(e));
}

ComplexMatrix ComplexMatrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                                   std::size_t ncols) const {
    if (row0 + nrows > rows_ || col0 + ncols > cols_) {
        throw std::out_of_range("ComplexMatrix::block: range exceeds matrix");
    }
    std::vector<Complex> e(nrows * ncols);
    for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t j = 0; j < ncols; ++j) e[i * ncols + j] = (*this)(row0 + i, col0 + j);
    return ComplexMatrix(nrows, ncols, std::move(e));
}

namespace {
void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string("ComplexMatrix: shape mismatch in ") + op);
    }
}
}  // namespace

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& other) const {
    require_same_shape(*this, other, "operator+");
    std::vector<Complex> e(entries_.size());
    for (std::size_t k = 0; k < entries_.size(); ++k) e[k] = entries_[k] + other.entries_[k];
    return ComplexMatrix(rows_, cols_, std::move(e));
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& other) const {
    require_same_shape(*this, other, "operator-");
    std::vector<Complex> e(entries_.size());
    for (std::size_t k = 0; k < entries_.size(); ++k) e[k] = entries_[k] - other.entries_[k];
    return ComplexMatrix(rows_, cols_, std::move(e));
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& other) const {
    if (cols_ != other.rows_) {
        throw std::invalid_argument("ComplexMatrix: inner dimension mismatch in operator*");
    }
    return detail::from_eigen(detail::view(*this) * detail::view(other));
}

ComplexMatrix operator*(const Complex& scalar, const ComplexMatrix& m) {
    std::vector<Complex> e(m.entries_.size());
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = scalar * m.entries_[k];
    return ComplexMatrix(m.rows_, m.cols_, std::move(e));
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& e : entries_) s += std::norm(e);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double s = 0.0;
    for (const Complex& e : entries_) s = std::max(s, std::abs(e));
    return s;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double s = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        s = std::max(s, std::abs(a.entries()[k] - b.entries()[k]));
    }
    return s;
}

namespace detail {

ComplexMatrix from_eigen(const EigenMat& m) {
    std::vector<Complex> e(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            e[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    return ComplexMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                         std::move(e));
}

EigenVec to_eigen_vector(std::span<const Complex> v) {
    EigenVec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

std::vector<Complex> from_eigen_vector(const EigenVec& v) {
    std::vector<Complex> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
}

Svd svd(const EigenMat& m) {
    // JacobiSVD is the most accurate choice at the dimensions seen here;
    // switch to BDCSVD once matrices get large enough for it to matter.
    if (std::min(m.rows(), m.cols()) <= 32) {
        Eigen::JacobiSVD<EigenMat> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        return {s.matrixU(), s.singularValues(), s.matrixV()};
    }
    Eigen::BDCSVD<EigenMat> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {s.matrixU(), s.singularValues(), s.matrixV()};
}

}  // namespace detail

}  // namespace ssv
