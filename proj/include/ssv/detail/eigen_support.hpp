#pragma once

#include <Eigen/Dense>

#include "ssv/complex_matrix.hpp"

namespace ssv::detail {

using EigenMat = Eigen::MatrixXcd;
using EigenVec = Eigen::VectorXcd;
using EigenMapRowMajor =
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

inline EigenMapRowMajor view(const ComplexMatrix& m) {
    return EigenMapRowMajor(m.entries().data(), static_cast<Eigen::Index>(m.rows()),
                            static_cast<Eigen::Index>(m.cols()));
}

inline EigenMat to_eigen(const ComplexMatrix& m) { return view(m); }

ComplexMatrix from_eigen(const EigenMat& m);

EigenVec to_eigen_vector(std::span<const Complex> v);

std::vector<Complex> from_eigen_vector(const EigenVec& v);

/// Singular value decomposition wrapper; thin U/V.
struct Svd {
    EigenMat u;
    Eigen::VectorXd sigma;
    EigenMat v;
};

Svd svd(const EigenMat& m);

}  // namespace ssv::detail
