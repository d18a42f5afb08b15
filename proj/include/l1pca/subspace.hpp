#pragma once

#include <cmath>

#include "l1pca/numlin.hpp"

namespace l1pca {

/// D x K basis with orthonormal columns.
struct SubspaceBasis {
    RealMatrix R;
    // Set when fewer than K directions were determined by the data and the
    // rest were filled in by a deterministic completion rule.
    bool rank_deficient_completion = false;

    Eigen::Index dim() const { return R.rows(); }
    Eigen::Index size() const { return R.cols(); }
};

/// ||R^T X||_1 (entrywise).
inline double l1_projection(const RealMatrix& R, const RealMatrix& X) {
    return (R.transpose() * X).cwiseAbs().sum();
}

/// ||R^T X||_2 (Frobenius).
inline double l2_projection(const RealMatrix& R, const RealMatrix& X) { return (R.transpose() * X).norm(); }

/// max |R^T R - I|.
inline double orthonormality_error(const RealMatrix& R) {
    const RealMatrix G = R.transpose() * R - RealMatrix::Identity(R.cols(), R.cols());
    return G.cwiseAbs().maxCoeff();
}

}  // namespace l1pca
