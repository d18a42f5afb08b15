#pragma once

// Exact maximum-L1-projection principal component (K = 1).
//
// r_L1 = X b / ||X b||_2 where b maximizes ||X b||_2 over {-1,+1}^N. The sign
// search is done by one of three exact routes: the rank-one closed form, the
// full 2^(N-1) enumeration, or the candidate set built from the hyperplane
// arrangement of Q (X^T X = Q Q^T), which has O(N^(d-1)) members for rank d.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "l1pca/detail/search.hpp"
#include "l1pca/errors.hpp"
#include "l1pca/numlin.hpp"
#include "l1pca/signs.hpp"

namespace l1pca {

inline constexpr int kDefaultExhaustiveCap = 24;

enum class SingleAlgorithm { rank1, exhaustive, candidates };

inline std::string_view to_string(SingleAlgorithm a) {
    switch (a) {
        case SingleAlgorithm::rank1: return "rank1";
        case SingleAlgorithm::exhaustive: return "exhaustive";
        case SingleAlgorithm::candidates: return "candidates";
    }
    return "unknown";
}

struct SolverOptions {
    std::optional<double> rel_tol;  // defaults to default_rel_tol(X)
    int exhaustive_cap = kDefaultExhaustiveCap;
    unsigned threads = 1;           // 0 = hardware concurrency
};

struct L1Result {
    RealVector component;       // r_L1, unit norm
    SignVector sign_vector;     // b_opt, canonical (first entry +1)
    double objective = 0.0;     // ||X^T r_L1||_1
    double sign_value = 0.0;    // ||X b_opt||_2
    SingleAlgorithm algorithm = SingleAlgorithm::rank1;
    Eigen::Index rank = 0;
    std::size_t evaluated = 0;  // sign vectors scored
    double elapsed = 0.0;       // seconds
};

struct CandidateSet {
    std::vector<SignVector> candidates;  // canonical, deduplicated, in generation order
    Eigen::Index source_rank = 0;
    std::size_t skipped_subsets = 0;     // rank-deficient row subsets
    std::size_t unresolved_entries = 0;  // ambiguous entries left at the +1 default
    std::size_t coincident_entries = 0;  // rows outside a subset that still lie on its null direction

    std::size_t size() const noexcept { return candidates.size(); }
};

/// sgn with exact zeros mapped to +1.
inline SignVector sign_quantize(const Eigen::Ref<const RealVector>& v) { return SignVector::from_signs(v); }

/// N x d factor with X^T X = Q Q^T and orthogonal columns (Q = U Sigma of svd(X^T)).
inline RealMatrix build_q(const RealMatrix& X, double rel_tol) {
    SvdFactors f = compact_svd(X.transpose(), rel_tol);
    return f.U * f.singvals.asDiagonal();
}

inline RealMatrix build_q(const RealMatrix& X) { return build_q(X, default_rel_tol(X)); }

/// sum_{g=0}^{d-1} C(N-1, g), in floating point so it cannot overflow.
inline double candidate_count_bound(Eigen::Index N, Eigen::Index d) {
    double total = 0.0, term = 1.0;
    for (Eigen::Index g = 0; g < d && g <= N - 1; ++g) {
        total += term;
        term = term * static_cast<double>(N - 1 - g) / static_cast<double>(g + 1);
    }
    return total;
}

namespace detail {

// Advances a sorted k-subset of {0..n-1} in colexicographic order.
inline bool next_colex_subset(std::vector<Eigen::Index>& idx, Eigen::Index n) {
    const std::size_t k = idx.size();
    for (std::size_t j = 0; j < k; ++j) {
        const Eigen::Index limit = (j + 1 < k) ? idx[j + 1] : n;
        if (idx[j] + 1 < limit) {
            ++idx[j];
            for (std::size_t t = 0; t < j; ++t) idx[t] = static_cast<Eigen::Index>(t);
            return true;
        }
    }
    return false;
}

inline RealMatrix select_rows(const RealMatrix& Q, const std::vector<Eigen::Index>& rows) {
    RealMatrix out(static_cast<Eigen::Index>(rows.size()), Q.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = Q.row(rows[i]);
    return out;
}

struct CandidateCollector {
    CandidateSet& out;
    std::unordered_set<SignVector, SignVectorHash> seen;

    // Rows not in `subset` with q_i^T c == 0 (within rounding) share the
    // subset's intersection, which the recursion does not disambiguate.
    void count_coincident(const RealMatrix& Q, const RealVector& p, const std::vector<Eigen::Index>& subset) {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (std::find(subset.begin(), subset.end(), i) != subset.end()) continue;
            if (std::abs(p(i)) <= 1e-10 * Q.row(i).norm()) ++out.coincident_entries;
        }
    }

    void add(SignVector b) {
        b.canonicalize();
        if (seen.insert(b).second) out.candidates.push_back(std::move(b));
    }
};

inline void collect_candidates(const RealMatrix& Q, CandidateCollector& sink) {
    const Eigen::Index N = Q.rows();
    const Eigen::Index m = Q.cols();

    if (m == 1) {
        sink.count_coincident(Q, Q.col(0), {});
        sink.add(sign_quantize(Q.col(0)));
        return;
    }

    if (m == 2) {
        for (Eigen::Index i = 0; i < N; ++i) {
            auto c = null_space_unit(Q.row(i));
            if (!c) {
                ++sink.out.skipped_subsets;
                continue;
            }
            const RealVector p = Q * *c;
            sink.count_coincident(Q, p, {i});
            SignVector b = sign_quantize(p);
            b.set(static_cast<std::size_t>(i), Q(i, 0) < 0.0 ? -1 : 1);
            sink.add(std::move(b));
        }
        return;
    }

    std::vector<Eigen::Index> subset(static_cast<std::size_t>(m - 1));
    for (std::size_t t = 0; t < subset.size(); ++t) subset[t] = static_cast<Eigen::Index>(t);
    RealMatrix reduced(m - 2, m - 1);
    do {
        const RealMatrix Qbar = select_rows(Q, subset);
        auto c = null_space_unit(Qbar);
        if (!c) {
            ++sink.out.skipped_subsets;
            continue;
        }
        const RealVector p = Q * *c;
        sink.count_coincident(Q, p, subset);
        SignVector b = sign_quantize(p);
        // Each row of the subset sits on its hyperplane; pick its side from the
        // null direction of the remaining subset rows in the leading m-1 columns.
        for (Eigen::Index j = 0; j < m - 1; ++j) {
            for (Eigen::Index r = 0, out_row = 0; r < m - 1; ++r) {
                if (r == j) continue;
                reduced.row(out_row++) = Qbar.row(r).head(m - 1);
            }
            auto cj = null_space_unit(reduced);
            const auto entry = static_cast<std::size_t>(subset[static_cast<std::size_t>(j)]);
            if (!cj) {
                ++sink.out.unresolved_entries;
                b.set(entry, 1);
                continue;
            }
            const double side = Qbar.row(j).head(m - 1).dot(*cj);
            b.set(entry, side < 0.0 ? -1 : 1);
        }
        sink.add(std::move(b));
    } while (next_colex_subset(subset, N));

    collect_candidates(Q.leftCols(m - 2), sink);
}

}  // namespace detail

/// Candidate sign vectors guaranteed to contain the maximizer of ||Q^T b||_2.
inline CandidateSet compute_candidates(const RealMatrix& Q) {
    if (Q.cols() < 1) throw DimensionMismatch("compute_candidates needs at least one column");
    if (Q.rows() < Q.cols())
        throw DimensionMismatch("compute_candidates needs N >= m, got N=" + std::to_string(Q.rows()) +
                                ", m=" + std::to_string(Q.cols()));
    if (!Q.allFinite()) throw InvalidArgument("Q has non-finite entries");

    CandidateSet set;
    set.source_rank = Q.cols();
    detail::CandidateCollector sink{set, {}};
    detail::collect_candidates(Q, sink);
    return set;
}

namespace detail {

// Entry i (1 <= i < N) of the canonical vector for `code` is +1 iff bit
// (N-1-i) is set, so integer order equals lexicographic order with -1 < +1.
inline SignVector sign_vector_from_code(std::uint64_t code, Eigen::Index N) {
    SignVector b(static_cast<std::size_t>(N), 1);
    for (Eigen::Index i = 1; i < N; ++i)
        if (((code >> (N - 1 - i)) & 1u) == 0) b.set(static_cast<std::size_t>(i), -1);
    return b;
}

inline constexpr std::uint64_t kResyncInterval = std::uint64_t{1} << 14;

}  // namespace detail

/// Brute-force maximizer of ||X b||_2 over canonical b (first entry +1).
inline std::pair<SignVector, double> solve_exhaustive(const RealMatrix& X, int exhaustive_cap = kDefaultExhaustiveCap,
                                                      unsigned threads = 1) {
    require_finite(X, "X");
    const Eigen::Index N = X.cols();
    if (N > exhaustive_cap) throw CapExceeded("exhaustive_cap", N, exhaustive_cap);
    if (N > 63) throw CapExceeded("exhaustive_cap", N, 63);

    const std::uint64_t total = std::uint64_t{1} << (N - 1);
    std::vector<detail::BestOf<std::uint64_t>> partial(detail::resolve_threads(threads));

    // Gray-code walk: consecutive codes differ in one entry, so X b changes by
    // a single column update. The running sum is recomputed periodically.
    detail::parallel_chunks(total, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
        auto& best = partial[w];
        RealVector y(X.rows());
        for (std::uint64_t t = lo; t < hi; ++t) {
            const std::uint64_t code = t ^ (t >> 1);
            if (t == lo || (t - lo) % detail::kResyncInterval == 0) {
                y = X * detail::sign_vector_from_code(code, N).to_vector();
            } else {
                const std::uint64_t changed = code ^ ((t - 1) ^ ((t - 1) >> 1));
                const int bit = std::countr_zero(changed);
                const Eigen::Index col = N - 1 - bit;
                const double s = ((code >> bit) & 1u) ? 2.0 : -2.0;
                y.noalias() += s * X.col(col);
            }
            best.offer(y.squaredNorm(), code);
        }
    });

    detail::BestOf<std::uint64_t> best;
    for (const auto& p : partial) best.merge(p);
    SignVector b = detail::sign_vector_from_code(best.key, N);
    const double value = (X * b.to_vector()).norm();
    return {std::move(b), value};
}

namespace detail {

inline bool general_position(const CandidateSet& set, double bound) {
    return set.skipped_subsets == 0 && set.unresolved_entries == 0 && set.coincident_entries == 0 &&
           static_cast<double>(set.size()) == bound;
}

// Fixed pseudo-random entries in [-1, 1), so results stay reproducible.
inline RealMatrix perturbation(Eigen::Index rows, Eigen::Index cols, std::uint64_t salt) {
    RealMatrix P(rows, cols);
    for (Eigen::Index i = 0; i < P.size(); ++i) {
        std::uint64_t x = static_cast<std::uint64_t>(i) + (salt << 40) + 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        x ^= x >> 31;
        P(i) = std::ldexp(static_cast<double>(x >> 11), -52) - 1.0;
    }
    return P;
}

// Rows of Q that are zero, parallel, or meet more than d-1 at a time leave the
// enumeration short of some cells. Every open cell of the original arrangement
// still contains a cell of a slightly perturbed one, so the perturbed Q's
// candidates are merged in and scored against the original data.
inline void add_perturbed_candidates(const RealMatrix& Q, CandidateSet& set, double bound) {
    CandidateCollector sink{set, {}};
    for (const auto& b : set.candidates) sink.seen.insert(b);
    const double scale = Q.cwiseAbs().maxCoeff();
    for (std::uint64_t attempt = 0; attempt < 3; ++attempt) {
        const double eps = scale * std::pow(10.0, -8.0 + 2.0 * static_cast<double>(attempt));
        const RealMatrix Qp = Q + eps * perturbation(Q.rows(), Q.cols(), attempt + 1);
        CandidateSet extra;
        CandidateCollector extra_sink{extra, {}};
        collect_candidates(Qp, extra_sink);
        for (auto& b : extra.candidates) sink.add(std::move(b));
        if (general_position(extra, bound)) return;
    }
}

inline L1Result finish_result(const RealMatrix& X, SignVector b, SingleAlgorithm algorithm, Eigen::Index rank,
                              std::size_t evaluated, std::chrono::steady_clock::time_point start) {
    b.canonicalize();
    const RealVector v = X * b.to_vector();
    const double norm = v.norm();
    if (norm == 0.0) throw DegenerateProjection();
    L1Result r;
    r.component = v / norm;
    r.sign_value = norm;
    r.objective = (X.transpose() * r.component).lpNorm<1>();
    r.sign_vector = std::move(b);
    r.algorithm = algorithm;
    r.rank = rank;
    r.evaluated = evaluated;
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace detail

/// Scores every candidate under b -> ||X b||_2 and returns the best one.
inline std::pair<SignVector, double> best_candidate(const RealMatrix& X, const CandidateSet& set) {
    detail::BestOf<SignVector> best;
    for (const auto& b : set.candidates) best.offer((X * b.to_vector()).squaredNorm(), b);
    if (!best.found) throw InvalidArgument("empty candidate set");
    return {best.key, std::sqrt(best.value)};
}

/// Exact L1 principal component of a D x N matrix.
inline L1Result l1pc_optimal(const RealMatrix& X, const SolverOptions& opts = {}) {
    const auto start = std::chrono::steady_clock::now();
    require_finite(X, "X");
    if (is_zero(X)) throw ZeroMatrix();
    const double tol = opts.rel_tol.value_or(default_rel_tol(X));
    const Eigen::Index N = X.cols();
    const Eigen::Index d = effective_rank(X, tol);

    if (d == 1) {
        const RealMatrix Q = build_q(X, tol);
        return detail::finish_result(X, sign_quantize(Q.col(0)), SingleAlgorithm::rank1, d, 1, start);
    }

    const double bound = candidate_count_bound(N, d);
    if (N <= opts.exhaustive_cap && std::ldexp(1.0, static_cast<int>(N - 1)) <= bound) {
        auto [b, value] = solve_exhaustive(X, opts.exhaustive_cap, opts.threads);
        (void)value;
        return detail::finish_result(X, std::move(b), SingleAlgorithm::exhaustive, d,
                                     std::size_t{1} << (N - 1), start);
    }

    const RealMatrix Q = build_q(X, tol);
    CandidateSet set = compute_candidates(Q);
    if (!detail::general_position(set, bound)) detail::add_perturbed_candidates(Q, set, bound);
    auto [b, value] = best_candidate(X, set);
    (void)value;
    return detail::finish_result(X, std::move(b), SingleAlgorithm::candidates, d, set.size(), start);
}

/// X sgn(q_1) / ||X sgn(q_1)||_2 for any X: exact when rank(X) = 1, a cheap
/// approximation otherwise.
inline RealVector rank1_approx_component(const RealMatrix& X, std::optional<double> rel_tol = std::nullopt) {
    require_finite(X, "X");
    if (is_zero(X)) throw ZeroMatrix();
    const RealMatrix Q = build_q(X, rel_tol.value_or(default_rel_tol(X)));
    const RealVector v = X * sign_quantize(Q.col(0)).canonical().to_vector();
    const double norm = v.norm();
    if (norm == 0.0) throw DegenerateProjection();
    return v / norm;
}

}  // namespace l1pca
