#ifndef SSAE_NUMERICS_HPP
#define SSAE_NUMERICS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ssae/errors.hpp"

namespace ssae {

using Index = Eigen::Index;

// Column-major throughout: samples are columns.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline std::string shape_string(Index rows, Index cols) {
    std::ostringstream os;
    os << rows << "x" << cols;
    return os.str();
}

template <typename Derived>
std::string shape_of(const Eigen::MatrixBase<Derived>& m) {
    return shape_string(m.rows(), m.cols());
}

template <typename A, typename B>
void require_same_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                        const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DataError(std::string(what) + ": shape mismatch " + shape_of(a) + " vs " +
                        shape_of(b));
}

template <typename A, typename B>
auto matmul(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
    -> Matrix<typename A::Scalar> {
    if (a.cols() != b.rows())
        throw DataError("matmul: inner dimensions differ (" + shape_of(a) + " times " +
                        shape_of(b) + ")");
    return a * b;
}

template <typename Derived>
typename Derived::Scalar frobenius_sq(const Eigen::MatrixBase<Derived>& a) {
    return a.squaredNorm();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
    return a.allFinite();
}

/// Rows of `b` that are linearly dependent on the rows preceding them.
///
/// Runs an in-order Cholesky on the Gram matrix b*b^T; a row whose Schur
/// pivot falls to or below `threshold` times its own squared norm is
/// reported and excluded from the remaining factorization.
template <typename Derived>
std::vector<Index> dependent_rows(const Eigen::MatrixBase<Derived>& b, double threshold = 1e-10) {
    using Scalar = typename Derived::Scalar;
    const Matrix<Scalar> gram = b * b.transpose();
    const Index k = gram.rows();
    Matrix<Scalar> lower = Matrix<Scalar>::Zero(k, k);
    std::vector<bool> kept(static_cast<std::size_t>(k), false);
    std::vector<Index> dependent;
    for (Index r = 0; r < k; ++r) {
        for (Index c = 0; c < r; ++c) {
            if (!kept[static_cast<std::size_t>(c)]) continue;
            Scalar s = gram(r, c);
            for (Index p = 0; p < c; ++p) s -= lower(r, p) * lower(c, p);
            lower(r, c) = s / lower(c, c);
        }
        Scalar pivot = gram(r, r);
        for (Index p = 0; p < r; ++p) pivot -= lower(r, p) * lower(r, p);
        const Scalar scale = gram(r, r);
        if (!(scale > Scalar(0)) || pivot <= Scalar(threshold) * scale) {
            dependent.push_back(r);
            lower.row(r).setZero();
            continue;
        }
        lower(r, r) = std::sqrt(pivot);
        kept[static_cast<std::size_t>(r)] = true;
    }
    return dependent;
}

/// Least-squares U minimizing ||x - U*b||_F through the normal equations
/// U = x b^T (b b^T)^-1. `b` must have full row rank.
template <typename DX, typename DB>
auto solve_ols(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DB>& b)
    -> Matrix<typename DX::Scalar> {
    using Scalar = typename DX::Scalar;
    if (x.cols() != b.cols())
        throw DataError("solve_ols: sample counts differ (X is " + shape_of(x) + ", B is " +
                        shape_of(b) + ")");
    const auto dependent = dependent_rows(b);
    if (!dependent.empty()) {
        std::ostringstream os;
        os << "solve_ols: design is rank deficient; dependent rows:";
        for (Index r : dependent) os << ' ' << r;
        throw NumericalError(os.str());
    }
    const Matrix<Scalar> gram = b * b.transpose();
    const Eigen::LLT<Matrix<Scalar>> llt(gram);
    const Matrix<Scalar> rhs = b * x.transpose();
    return llt.solve(rhs).transpose();
}

}  // namespace ssae

#endif  // SSAE_NUMERICS_HPP
