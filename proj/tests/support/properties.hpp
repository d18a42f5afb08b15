#pragma once

// Generated-case invariant checks shared by the property tests and the
// acceptance runner. Each returns the number of failing cases.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "l1pca/l1pca.hpp"
#include "oracles.hpp"

namespace props {

struct Outcome {
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    void check(bool ok, const std::string& what) {
        ++cases;
        if (!ok && failures++ == 0) first_failure = what;
    }
};

/// max|R^T R - I| <= 1e-10 for every basis-producing routine.
inline Outcome orthonormality(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Outcome o;
    for (int t = 0; t < n; ++t) {
        const int D = gen::uniform_int(rng, 2, 4);
        const int N = gen::uniform_int(rng, D + 1, 7);
        const int K = gen::uniform_int(rng, 1, std::min(D, 2));
        const l1pca::RealMatrix X = gen::gaussian(rng, D, N);
        double err = 0.0;
        err = std::max(err, l1pca::orthonormality_error(l1pca::l1_multi_optimal(X, K).basis.R));
        err = std::max(err, l1pca::orthonormality_error(l1pca::greedy_deflation_l1(X, K).R));
        err = std::max(err, l1pca::orthonormality_error(l1pca::l2_subspace(X, K).R));
        o.check(err <= 1e-10, "case " + std::to_string(t) + ": error " + std::to_string(err));
    }
    return o;
}

/// alpha X yields the same signs and components, objectives scaled by alpha.
inline Outcome scaling_equivariance(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Outcome o;
    for (int t = 0; t < n; ++t) {
        const int D = gen::uniform_int(rng, 2, 4);
        const int N = gen::uniform_int(rng, 3, 10);
        const l1pca::RealMatrix X = gen::gaussian(rng, D, N);
        const double alpha = std::exp(gen::uniform(rng, -5.0, 5.0));
        const auto a = l1pca::l1pc_optimal(X);
        const auto b = l1pca::l1pc_optimal(alpha * X);
        bool ok = a.sign_vector == b.sign_vector && (a.component - b.component).norm() <= 1e-10 &&
                  std::abs(b.objective - alpha * a.objective) <= 1e-9 * b.objective;
        if (t % 4 == 0 && D >= 2 && N <= 7) {
            const auto ma = l1pca::l1_multi_optimal(X, 2);
            const auto mb = l1pca::l1_multi_optimal(alpha * X, 2);
            ok = ok && ma.sign_matrix == mb.sign_matrix && (ma.basis.R - mb.basis.R).cwiseAbs().maxCoeff() <= 1e-9 &&
                 std::abs(mb.objective - alpha * ma.objective) <= 1e-9 * mb.objective;
        }
        o.check(ok, "case " + std::to_string(t) + " alpha " + std::to_string(alpha));
    }
    return o;
}

/// Canonical forms are unique per +-b pair, and solver output does not depend
/// on global sign of the data, thread count, or repetition.
inline Outcome canonicalization_determinism(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Outcome o;
    for (int t = 0; t < n; ++t) {
        const int N = gen::uniform_int(rng, 2, 10);
        const l1pca::SignVector b = l1pca::sign_quantize(gen::gaussian(rng, N, 1));
        l1pca::SignVector neg = b;
        for (std::size_t i = 0; i < neg.size(); ++i) neg.flip(i);
        bool ok = b.canonical() == neg.canonical() && b.canonical().is_canonical() &&
                  b.canonical().canonical() == b.canonical();

        const l1pca::RealMatrix X = gen::gaussian(rng, gen::uniform_int(rng, 2, 4), N + 2);
        l1pca::SolverOptions one, many;
        many.threads = 3;
        const auto r1 = l1pca::l1pc_optimal(X, one);
        const auto r2 = l1pca::l1pc_optimal(X, many);
        const auto r3 = l1pca::l1pc_optimal(-X);
        ok = ok && r1.sign_vector == r2.sign_vector && r1.sign_vector == r3.sign_vector &&
             r1.sign_vector.is_canonical() && r1.component == r2.component;
        o.check(ok, "case " + std::to_string(t));
    }
    return o;
}

/// mse(X, r) + ||X^T r||^2 / n = ||X||_F^2 / n to 1e-9 relative.
inline Outcome pythagoras(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Outcome o;
    for (int t = 0; t < n; ++t) {
        const int D = gen::uniform_int(rng, 1, 8);
        const int N = gen::uniform_int(rng, 1, 200);
        const l1pca::RealMatrix X = gen::gaussian(rng, D, N) * std::exp(gen::uniform(rng, -3.0, 3.0));
        l1pca::RealVector r = gen::gaussian(rng, D, 1);
        r.normalize();
        const double nn = static_cast<double>(N);
        const double lhs = l1pca::mean_square_fit_error(X, r) + (X.transpose() * r).squaredNorm() / nn;
        const double rhs = X.squaredNorm() / nn;
        o.check(std::abs(lhs - rhs) <= 1e-9 * rhs, "case " + std::to_string(t));
    }
    return o;
}

}  // namespace props
