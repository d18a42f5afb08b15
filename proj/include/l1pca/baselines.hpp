#pragma once

// Reference methods the exact solvers are compared against.

#include <cstdint>
#include <random>
#include <vector>

#include "l1pca/errors.hpp"
#include "l1pca/l1_single.hpp"
#include "l1pca/numlin.hpp"
#include "l1pca/signs.hpp"
#include "l1pca/subspace.hpp"

namespace l1pca {

/// K leading left singular vectors of X (standard PCA subspace).
inline SubspaceBasis l2_subspace(const RealMatrix& X, int K) {
    const SvdFactors f = compact_svd(X);
    if (K < 1 || K > f.rank())
        throw InvalidArgument("K=" + std::to_string(K) + " exceeds rank " + std::to_string(f.rank()));
    return SubspaceBasis{f.U.leftCols(K), false};
}

struct FixedPointResult {
    SignVector sign_vector;  // canonical
    bool converged = false;
    int iterations = 0;
    double value = 0.0;      // ||X b||_2
};

/// b <- sgn(X^T X b) until b stops changing or max_iter updates were made.
/// A coordinate whose correlation is exactly zero keeps its previous sign.
inline FixedPointResult fixed_point_l1(const RealMatrix& X, const SignVector& b0, int max_iter) {
    require_finite(X, "X");
    if (static_cast<Eigen::Index>(b0.size()) != X.cols())
        throw DimensionMismatch("initial sign vector length differs from N");
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");

    FixedPointResult out;
    SignVector b = b0;
    for (int it = 1; it <= max_iter; ++it) {
        const RealVector z = X.transpose() * (X * b.to_vector());
        SignVector next = b;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            if (z(i) > 0.0) next.set(static_cast<std::size_t>(i), 1);
            else if (z(i) < 0.0) next.set(static_cast<std::size_t>(i), -1);
        }
        out.iterations = it;
        if (next == b) {
            out.converged = true;
            break;
        }
        b = std::move(next);
    }
    b.canonicalize();
    out.value = (X * b.to_vector()).norm();
    out.sign_vector = std::move(b);
    return out;
}

inline constexpr int kDefaultRestarts = 8;

struct MultistartResult {
    FixedPointResult best;
    std::vector<double> values;  // per start, sgn(q1) first
};

/// Best fixed point over b0 = sgn(q1) plus `restarts` random Gaussian sign draws.
inline MultistartResult fixed_point_multistart(const RealMatrix& X, int restarts, std::uint64_t seed,
                                               int max_iter = 1000) {
    require_finite(X, "X");
    if (is_zero(X)) throw ZeroMatrix();
    std::vector<SignVector> starts;
    starts.push_back(sign_quantize(build_q(X).col(0)));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int r = 0; r < restarts; ++r) {
        RealVector v(X.cols());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
        starts.push_back(sign_quantize(v));
    }

    MultistartResult out;
    bool first = true;
    for (const auto& b0 : starts) {
        FixedPointResult fp = fixed_point_l1(X, b0, max_iter);
        out.values.push_back(fp.value);
        if (first || fp.value > out.best.value) {
            out.best = std::move(fp);
            first = false;
        }
    }
    return out;
}

/// Component r = X b / ||X b|| for a sign vector.
inline RealVector component_from_signs(const RealMatrix& X, const SignVector& b) {
    const RealVector v = X * b.to_vector();
    const double n = v.norm();
    if (n == 0.0) throw DegenerateProjection();
    return v / n;
}

enum class DeflationStage { exact, fixed_point };

struct DeflationOptions {
    DeflationStage stage = DeflationStage::exact;
    int restarts = kDefaultRestarts;  // used by the fixed_point stage
    std::uint64_t seed = 0;
    SolverOptions solver{};
};

/// Greedy components: stage k solves the single-component problem on the data
/// projected away from the k-1 components already found.
inline SubspaceBasis greedy_deflation_l1(const RealMatrix& X, int K, const DeflationOptions& opts = {}) {
    require_finite(X, "X");
    if (is_zero(X)) throw ZeroMatrix();
    const Eigen::Index rank = effective_rank(X);
    if (K < 1 || K > rank)
        throw InvalidArgument("K=" + std::to_string(K) + " exceeds rank " + std::to_string(rank));

    const double scale = compact_svd(X).singvals(0);
    RealMatrix R(X.rows(), 0);
    for (int k = 0; k < K; ++k) {
        const RealMatrix P = RealMatrix::Identity(X.rows(), X.rows()) - R * R.transpose();
        const RealMatrix Xk = P * X;
        if (is_zero(Xk) || Xk.norm() <= 1e-10 * scale)
            throw RankExhausted("no residual energy left at stage " + std::to_string(k + 1));

        RealVector r;
        if (opts.stage == DeflationStage::exact) {
            r = l1pc_optimal(Xk, opts.solver).component;
        } else {
            auto ms = fixed_point_multistart(Xk, opts.restarts, opts.seed + static_cast<std::uint64_t>(k));
            r = component_from_signs(Xk, ms.best.sign_vector);
        }
        for (int pass = 0; pass < 2; ++pass) r -= R * (R.transpose() * r);
        r.normalize();
        R.conservativeResize(Eigen::NoChange, R.cols() + 1);
        R.col(R.cols() - 1) = r;
    }
    return SubspaceBasis{R, false};
}

}  // namespace l1pca
