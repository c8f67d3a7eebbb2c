#pragma once

#include <Eigen/Dense>

#include <complex>

namespace levyou {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

// Largest singular value. Dimensions are small, so a full Jacobi SVD is fine.
inline double operator_norm(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

// Composite Simpson weights for n (even) equal intervals of width h.
inline double simpson_weight(std::size_t j, std::size_t n, double h) {
    if (j == 0 || j == n) {
        return h / 3.0;
    }
    return (j % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
}

}  // namespace levyou
