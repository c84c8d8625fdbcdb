#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ssv {

using Complex = std::complex<double>;

/// Immutable dense complex matrix, entries stored row-major.
///
/// All entries are validated to be finite on construction. Operations
/// return new values; there is no in-place mutation, so instances can be
/// shared freely across threads.
class ComplexMatrix {
public:
    /// Empty (0x0) matrix, used as an "absent" sentinel for optional arguments.
    ComplexMatrix() = default;

    /// Throws std::invalid_argument on zero dimensions, a size mismatch, or
    /// non-finite entries.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix zero(std::size_t rows, std::size_t cols);
    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> diag);
    static ComplexMatrix diagonal(std::span<const double> diag);
    static ComplexMatrix column(std::span<const Complex> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return entries_.empty(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    const Complex& operator()(std::size_t i, std::size_t j) const noexcept {
        return entries_[i * cols_ + j];
    }

    std::span<const Complex> entries() const noexcept { return entries_; }

    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;
    ComplexMatrix adjoint() const;
    ComplexMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
                        std::size_t ncols) const;

    ComplexMatrix operator+(const ComplexMatrix& other) const;
    ComplexMatrix operator-(const ComplexMatrix& other) const;
    ComplexMatrix operator*(const ComplexMatrix& other) const;
    friend ComplexMatrix operator*(const Complex& scalar, const ComplexMatrix& m);

    double frobenius_norm() const;
    double max_abs() const;

    bool operator==(const ComplexMatrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

ComplexMatrix operator*(const Complex& scalar, const ComplexMatrix& m);

/// Largest absolute entrywise difference; requires equal shapes.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace ssv
