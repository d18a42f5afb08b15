#pragma once

// Joint computation of K > 1 L1 principal components.
//
// The optimal basis is R = U V^T from the SVD of X B_opt, where B_opt
// maximizes the nuclear norm ||X B||_* over N x K sign matrices. Negating a
// column of B or permuting columns leaves ||X B||_* unchanged, so the search
// runs over canonical matrices only: first row all +1 and columns in
// nonincreasing lexicographic order (-1 < +1).

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "l1pca/detail/search.hpp"
#include "l1pca/errors.hpp"
#include "l1pca/l1_single.hpp"
#include "l1pca/numlin.hpp"
#include "l1pca/signs.hpp"
#include "l1pca/subspace.hpp"

namespace l1pca {

inline constexpr int kDefaultMultiCap = 22;

struct MultiOptions {
    int multi_cap = kDefaultMultiCap;  // bound on (N-1)*K
    unsigned threads = 1;              // 0 = hardware concurrency
};

struct MultiResult {
    SubspaceBasis basis;
    SignMatrix sign_matrix;    // B_opt, canonical
    double objective = 0.0;    // ||R^T X||_1
    double nuclear = 0.0;      // ||X B_opt||_*
    double elapsed = 0.0;
};

/// argmax of tr(R^T A) over orthonormal D x K R, i.e. R = U V^T.
///
/// When rank(A) < K the left factor is completed with the leading left
/// singular vectors of `completion_source` (if given) orthogonalized against
/// the determined directions, then with any remaining orthonormal directions.
/// The result flags this case in rank_deficient_completion.
inline SubspaceBasis procrustes_r(const RealMatrix& A, const RealMatrix* completion_source = nullptr) {
    require_finite(A, "A");
    if (is_zero(A)) throw ZeroMatrix();
    const Eigen::Index D = A.rows(), K = A.cols();
    if (K > D) throw InvalidArgument("procrustes_r needs K <= D");

    Eigen::JacobiSVD<RealMatrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    const double cutoff = default_rel_tol(A) * s(0);
    Eigen::Index d = 0;
    while (d < s.size() && s(d) > cutoff) ++d;

    RealMatrix U = svd.matrixU().leftCols(K);
    RealMatrix V = svd.matrixV();
    {
        RealMatrix Ud = U.leftCols(d), Vd = V.leftCols(d);
        detail::canonicalize_svd_signs(Ud, Vd);
        U.leftCols(d) = Ud;
        V.leftCols(d) = Vd;
    }

    SubspaceBasis out;
    if (d < K) {
        out.rank_deficient_completion = true;
        std::vector<RealVector> pool;
        if (completion_source != nullptr && !is_zero(*completion_source)) {
            const SvdFactors f = compact_svd(*completion_source);
            for (Eigen::Index j = 0; j < f.U.cols(); ++j) pool.emplace_back(f.U.col(j));
        }
        for (Eigen::Index j = d; j < D; ++j) pool.emplace_back(svd.matrixU().col(j));

        Eigen::Index filled = d;
        for (const RealVector& cand : pool) {
            if (filled == K) break;
            RealVector v = cand;
            for (int pass = 0; pass < 2; ++pass)
                v -= U.leftCols(filled) * (U.leftCols(filled).transpose() * v);
            const double n = v.norm();
            if (n < 1e-8) continue;
            U.col(filled++) = v / n;
        }
        if (filled < K) throw InvalidArgument("could not complete the left factor");
    }
    out.R = U * V.transpose();
    return out;
}

namespace detail {

// Visits every nonincreasing K-tuple (k_0 >= k_1 >= ... ) with k_0 in
// [lo, hi) and k_i < M.
template <class Visit>
void for_each_nonincreasing_tuple(std::uint64_t lo, std::uint64_t hi, int K, Visit&& visit) {
    std::vector<std::uint64_t> tuple(static_cast<std::size_t>(K), 0);
    for (std::uint64_t first = lo; first < hi; ++first) {
        tuple[0] = first;
        for (std::size_t i = 1; i < tuple.size(); ++i) tuple[i] = 0;
        while (true) {
            visit(tuple);
            // odometer over the tail, each digit bounded by its predecessor
            bool advanced = false;
            for (std::size_t pos = tuple.size(); pos-- > 1;) {
                if (tuple[pos] < tuple[pos - 1]) {
                    ++tuple[pos];
                    for (std::size_t t = pos + 1; t < tuple.size(); ++t) tuple[t] = 0;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) break;
        }
    }
}

}  // namespace detail

/// Brute-force maximizer of ||X B||_* over canonical N x K sign matrices.
inline std::pair<SignMatrix, double> solve_b_opt_exhaustive(const RealMatrix& X, int K,
                                                            const MultiOptions& opts = {}) {
    require_finite(X, "X");
    const Eigen::Index D = X.rows(), N = X.cols();
    if (K < 1 || K > D) throw InvalidArgument("K must satisfy 1 <= K <= D");
    const long long work = static_cast<long long>(N - 1) * K;
    if (work > opts.multi_cap) throw CapExceeded("multi_cap", work, opts.multi_cap);

    if (K == 1) {
        auto [b, value] = solve_exhaustive(X, static_cast<int>(N), opts.threads);
        return {SignMatrix({std::move(b)}), value};
    }

    const std::uint64_t M = std::uint64_t{1} << (N - 1);
    RealMatrix Y(D, static_cast<Eigen::Index>(M));
    for (std::uint64_t code = 0; code < M; ++code)
        Y.col(static_cast<Eigen::Index>(code)) = X * detail::sign_vector_from_code(code, N).to_vector();

    using Key = std::vector<std::uint64_t>;
    std::vector<detail::BestOf<Key>> partial(detail::resolve_threads(opts.threads));
    detail::parallel_chunks(M, opts.threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
        RealMatrix A(D, K);
        Eigen::JacobiSVD<RealMatrix> svd(D, K);
        detail::for_each_nonincreasing_tuple(lo, hi, K, [&](const Key& tuple) {
            for (int k = 0; k < K; ++k) A.col(k) = Y.col(static_cast<Eigen::Index>(tuple[static_cast<std::size_t>(k)]));
            svd.compute(A);
            partial[w].offer(svd.singularValues().sum(), tuple);
        });
    });

    detail::BestOf<Key> best;
    for (const auto& p : partial) best.merge(p);
    std::vector<SignVector> cols;
    for (auto code : best.key) cols.push_back(detail::sign_vector_from_code(code, N));
    SignMatrix B(std::move(cols));
    const double value = nuclear_norm(X * B.to_matrix());
    return {std::move(B), value};
}

/// Exact L1-optimal K-dimensional basis of a D x N matrix.
inline MultiResult l1_multi_optimal(const RealMatrix& X, int K, const MultiOptions& opts = {}) {
    const auto start = std::chrono::steady_clock::now();
    require_finite(X, "X");
    if (is_zero(X)) throw ZeroMatrix();

    auto [B, nuclear] = solve_b_opt_exhaustive(X, K, opts);
    MultiResult r;
    const RealMatrix A = X * B.to_matrix();
    r.basis = procrustes_r(A, &X);
    r.sign_matrix = std::move(B);
    r.nuclear = nuclear;
    r.objective = l1_projection(r.basis.R, X);
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace l1pca
