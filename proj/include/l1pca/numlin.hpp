#pragma once

// Dense linear-algebra kernels shared by the solvers: compact SVD with a
// reproducible sign convention, one-dimensional null spaces, nuclear norm and
// numerical rank. Everything here is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "l1pca/errors.hpp"

namespace l1pca {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct SvdFactors {
    RealMatrix U;        // rows x d, orthonormal columns
    RealVector singvals; // length d, positive, nonincreasing
    RealMatrix V;        // cols x d, orthonormal columns

    Eigen::Index rank() const { return singvals.size(); }
};

/// Standard numerical-rank cutoff used when the caller does not supply one.
inline double default_rel_tol(const RealMatrix& M) {
    return 1e-9 * static_cast<double>(std::max(M.rows(), M.cols()));
}

inline void require_finite(const RealMatrix& M, const char* what = "matrix") {
    if (M.size() == 0)
        throw InvalidArgument(std::string(what) + " is empty");
    if (!M.allFinite())
        throw InvalidArgument(std::string(what) + " has non-finite entries");
}

inline bool is_zero(const RealMatrix& M) { return (M.array() == 0.0).all(); }

namespace detail {

// Flip column pairs so that each column of U has its largest-magnitude entry
// positive. The first maximal index wins on ties.
inline void canonicalize_svd_signs(RealMatrix& U, RealMatrix& V) {
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
        Eigen::Index imax = 0;
        U.col(j).cwiseAbs().maxCoeff(&imax);
        if (U(imax, j) < 0.0) {
            U.col(j) *= -1.0;
            V.col(j) *= -1.0;
        }
    }
}

}  // namespace detail

/// Compact SVD keeping only the triplets with sigma_i > rel_tol * sigma_1.
inline SvdFactors compact_svd(const RealMatrix& M, double rel_tol) {
    require_finite(M);
    if (is_zero(M)) throw ZeroMatrix();

    Eigen::JacobiSVD<RealMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const double cutoff = rel_tol * s(0);
    Eigen::Index d = 0;
    while (d < s.size() && s(d) > cutoff) ++d;

    SvdFactors f;
    f.U = svd.matrixU().leftCols(d);
    f.singvals = s.head(d);
    f.V = svd.matrixV().leftCols(d);
    detail::canonicalize_svd_signs(f.U, f.V);
    return f;
}

inline SvdFactors compact_svd(const RealMatrix& M) { return compact_svd(M, default_rel_tol(M)); }

/// Count of singular values above rel_tol * sigma_1.
inline Eigen::Index effective_rank(const RealMatrix& M, double rel_tol) {
    require_finite(M);
    if (is_zero(M)) throw ZeroMatrix();
    Eigen::JacobiSVD<RealMatrix> svd(M);
    const RealVector& s = svd.singularValues();
    return (s.array() > rel_tol * s(0)).count();
}

inline Eigen::Index effective_rank(const RealMatrix& M) { return effective_rank(M, default_rel_tol(M)); }

/// Sum of singular values.
inline double nuclear_norm(const RealMatrix& M) {
    require_finite(M);
    Eigen::JacobiSVD<RealMatrix> svd(M);
    return svd.singularValues().sum();
}

namespace detail {

// c_last >= 0; when c_last is exactly zero the last nonzero entry decides.
inline void orient_last_nonnegative(RealVector& c) {
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) {
        if (c(k) != 0.0) {
            if (c(k) < 0.0) c = -c;
            return;
        }
    }
}

}  // namespace detail

/// Unit vector spanning the null space of an (m-1) x m matrix.
///
/// Returns std::nullopt when M is row-rank deficient (the null space is then
/// more than one-dimensional and no unique direction exists). The result is
/// oriented so that its last entry is nonnegative.
inline std::optional<RealVector> null_space_unit(const RealMatrix& M, double rel_tol = 1e-12) {
    if (M.rows() + 1 != M.cols())
        throw DimensionMismatch("null_space_unit expects rows == cols - 1, got " +
                                std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
    if (!M.allFinite()) throw InvalidArgument("matrix has non-finite entries");

    RealVector c(M.cols());
    if (M.rows() == 0) {
        c(0) = 1.0;
        return c;
    }
    if (M.rows() == 1 && M.cols() == 2) {
        const double a = M(0, 0), b = M(0, 1);
        const double n = std::hypot(a, b);
        if (n == 0.0) return std::nullopt;
        c << -b / n, a / n;
        detail::orient_last_nonnegative(c);
        return c;
    }

    Eigen::JacobiSVD<RealMatrix> svd(M, Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    if (s(0) == 0.0 || s(s.size() - 1) <= rel_tol * static_cast<double>(M.cols()) * s(0))
        return std::nullopt;
    c = svd.matrixV().col(M.cols() - 1);
    c.normalize();
    detail::orient_last_nonnegative(c);
    return c;
}

}  // namespace l1pca
