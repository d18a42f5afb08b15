#include <cmath>
#include <random>
#include <unordered_set>

#include <gtest/gtest.h>

#include "l1pca/baselines.hpp"
#include "l1pca/l1_single.hpp"
#include "support/oracles.hpp"

using namespace l1pca;

namespace {

RealMatrix x_small() {
    RealMatrix X(2, 3);
    X << 1, 0, 1, 0, 1, 1;
    return X;
}

RealMatrix x_rank1() {
    RealMatrix X(2, 2);
    X << 1, 2, 2, 4;
    return X;
}

}  // namespace

TEST(BuildQ, RankOneExample) {
    // X^T X = [[5,10],[10,20]], sole eigenvalue 25 with eigenvector [1,2]/sqrt5,
    // so q = 5 * [1,2]/sqrt5 = [sqrt5, 2 sqrt5] up to sign.
    const RealMatrix Q = build_q(x_rank1());
    ASSERT_EQ(Q.cols(), 1);
    const double s = Q(0, 0) > 0 ? 1.0 : -1.0;
    EXPECT_NEAR(s * Q(0, 0), std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(s * Q(1, 0), 2 * std::sqrt(5.0), 1e-12);
    RealMatrix expected(2, 2);
    expected << 5, 10, 10, 20;
    EXPECT_LE((Q * Q.transpose() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildQ, IdentityAndRandomReconstruct) {
    const RealMatrix Q = build_q(RealMatrix::Identity(2, 2));
    EXPECT_LE((Q * Q.transpose() - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);

    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        const RealMatrix X = gen::gaussian(rng, gen::uniform_int(rng, 1, 6), gen::uniform_int(rng, 1, 15));
        const RealMatrix Q2 = build_q(X);
        const double s2 = Eigen::JacobiSVD<RealMatrix>(X).singularValues()(0);
        const RealMatrix G = X.transpose() * X;
        EXPECT_LE(Eigen::JacobiSVD<RealMatrix>(Q2 * Q2.transpose() - G).singularValues()(0), 1e-8 * s2 * s2);
        const RealMatrix QtQ = Q2.transpose() * Q2;
        const RealMatrix off = QtQ - RealMatrix(QtQ.diagonal().asDiagonal());
        EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-8 * s2 * s2);
        EXPECT_EQ(Q2.cols(), effective_rank(X));
    }
}

TEST(BuildQ, ZeroThrows) { EXPECT_THROW(build_q(RealMatrix::Zero(2, 2)), ZeroMatrix); }

TEST(SignQuantize, Examples) {
    EXPECT_EQ(sign_quantize(Eigen::Vector3d(0.3, -2, 5)), (SignVector{1, -1, 1}));
    EXPECT_EQ(sign_quantize(Eigen::Vector2d(0, -1)), (SignVector{1, -1}));
    EXPECT_EQ(sign_quantize(Eigen::Vector2d(-0.0001, 0.0001)), (SignVector{-1, 1}));
}

TEST(SignVector, RejectsZero) { EXPECT_THROW((SignVector{1, 0}), InvalidArgument); }

TEST(ComputeCandidates, SingleColumnIsSignOfQ) {
    RealMatrix Q(3, 1);
    Q << 3, -1, 2;
    const CandidateSet S = compute_candidates(Q);
    ASSERT_EQ(S.size(), 1u);
    EXPECT_EQ(S.candidates[0], (SignVector{1, -1, 1}));
}

TEST(ComputeCandidates, ThreeByTwoHasThreeCandidates) {
    std::mt19937_64 rng(4);
    const CandidateSet S = compute_candidates(gen::gaussian(rng, 3, 2));
    EXPECT_EQ(S.size(), 3u);  // C(2,0) + C(2,1)
}

TEST(ComputeCandidates, ContainsOptimumOfSmallExample) {
    const RealMatrix X = x_small();
    const auto brute = oracle::max_sign_projection_all(X);
    ASSERT_NEAR(brute.value, std::sqrt(8.0), 1e-14);
    const CandidateSet S = compute_candidates(build_q(X));
    bool found = false;
    for (const auto& b : S.candidates) found |= (b == SignVector{1, 1, 1});
    EXPECT_TRUE(found);
}

TEST(ComputeCandidates, RejectsTooFewRows) {
    EXPECT_THROW(compute_candidates(RealMatrix::Ones(2, 3)), DimensionMismatch);
}

TEST(ComputeCandidates, SubsetOfAllCombinationOracleAndContainsItsBest) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 60; ++t) {
        const int d = gen::uniform_int(rng, 2, 4);
        const int N = gen::uniform_int(rng, d + 1, 11);
        const RealMatrix X = gen::gaussian(rng, d, N);
        const RealMatrix Q = build_q(X);
        const CandidateSet S = compute_candidates(Q);
        const auto full = oracle::all_combination_candidates(Q);
        for (const auto& b : S.candidates) {
            oracle::Signs s(b.entries().begin(), b.entries().end());
            EXPECT_TRUE(full.count(s)) << "candidate outside the arrangement cells";
        }
        double best_full = 0.0;
        for (const auto& s : full) best_full = std::max(best_full, (X * oracle::signs_to_vector(s)).norm());
        EXPECT_NEAR(best_candidate(X, S).second, best_full, 1e-10 * best_full);
    }
}

TEST(ComputeCandidates, ColexSubsetOrderIsDeterministic) {
    std::mt19937_64 rng(12);
    const RealMatrix Q = build_q(gen::gaussian(rng, 3, 9));
    EXPECT_EQ(compute_candidates(Q).candidates, compute_candidates(Q).candidates);
}

TEST(SolveExhaustive, Examples) {
    auto [b, v] = solve_exhaustive(x_small());
    EXPECT_EQ(b, (SignVector{1, 1, 1}));
    EXPECT_NEAR(v, std::sqrt(8.0), 1e-14);

    std::tie(b, v) = solve_exhaustive(x_rank1());
    EXPECT_EQ(b, (SignVector{1, 1}));
    EXPECT_NEAR(v, std::sqrt(45.0), 1e-13);

    std::tie(b, v) = solve_exhaustive(RealMatrix::Identity(2, 2));
    EXPECT_EQ(b, (SignVector{1, -1}));
    EXPECT_NEAR(v, std::sqrt(2.0), 1e-14);
}

TEST(SolveExhaustive, CapExceeded) {
    EXPECT_THROW(solve_exhaustive(RealMatrix::Ones(2, 25)), CapExceeded);
    EXPECT_THROW(solve_exhaustive(RealMatrix::Ones(2, 6), 5), CapExceeded);
}

TEST(SolveExhaustive, MatchesPlainEnumerationAndThreadCountDoesNotMatter) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 40; ++t) {
        const RealMatrix X = gen::gaussian(rng, gen::uniform_int(rng, 2, 5), gen::uniform_int(rng, 1, 14));
        const auto one = solve_exhaustive(X, 24, 1);
        const auto four = solve_exhaustive(X, 24, 4);
        const double ref = oracle::max_sign_projection_canonical(X);
        EXPECT_NEAR(one.second, ref, 1e-10 * ref);
        EXPECT_EQ(one.first, four.first);
        EXPECT_TRUE(one.first.is_canonical());
    }
}

TEST(L1pcOptimal, SmallExample) {
    const L1Result r = l1pc_optimal(x_small());
    EXPECT_NEAR((r.component - RealVector::Constant(2, 1 / std::sqrt(2.0))).norm(), 0.0, 1e-14);
    EXPECT_NEAR(r.objective, 2 * std::sqrt(2.0), 1e-13);
    EXPECT_EQ(r.sign_vector, (SignVector{1, 1, 1}));
}

TEST(L1pcOptimal, RankOneUsesClosedForm) {
    const L1Result r = l1pc_optimal(x_rank1());
    EXPECT_EQ(r.algorithm, SingleAlgorithm::rank1);
    EXPECT_NEAR((r.component - RealVector(Eigen::Vector2d(1, 2) / std::sqrt(5.0))).norm(), 0.0, 1e-14);
    EXPECT_NEAR(r.sign_value, solve_exhaustive(x_rank1()).second, 1e-12);
}

TEST(L1pcOptimal, PositiveScalingIsEquivariant) {
    std::mt19937_64 rng(6);
    const RealMatrix X = gen::gaussian(rng, 3, 9);
    const L1Result a = l1pc_optimal(X);
    const L1Result b = l1pc_optimal(7.5 * X);
    EXPECT_EQ(a.sign_vector, b.sign_vector);
    EXPECT_LE((a.component - b.component).norm(), 1e-12);
    EXPECT_NEAR(b.objective, 7.5 * a.objective, 1e-10 * b.objective);
}

TEST(L1pcOptimal, AgreesWithBruteForceAndSatisfiesIdentity) {
    std::mt19937_64 rng(1234);
    for (int t = 0; t < 200; ++t) {
        const RealMatrix X = gen::gaussian(rng, gen::uniform_int(rng, 2, 5), gen::uniform_int(rng, 5, 12));
        const L1Result r = l1pc_optimal(X);
        const double ref = oracle::max_sign_projection_canonical(X);
        EXPECT_NEAR(r.sign_value, ref, 1e-9 * ref);
        EXPECT_NEAR(r.objective, r.sign_value, 1e-9 * ref);
        EXPECT_NEAR(r.component.norm(), 1.0, 1e-12);
        EXPECT_TRUE(r.sign_vector.is_canonical());
    }
}

TEST(L1pcOptimal, CandidatePathBeyondExhaustiveCap) {
    std::mt19937_64 rng(77);
    const RealMatrix X = gen::gaussian(rng, 2, 40);
    const L1Result r = l1pc_optimal(X);
    EXPECT_EQ(r.algorithm, SingleAlgorithm::candidates);
    EXPECT_EQ(r.evaluated, 40u);
    EXPECT_NEAR(r.objective, oracle::max_l1_projection_2d(X), 1e-8 * r.objective);
}

TEST(L1pcOptimal, OptimumIsFixedPointOfSignIteration) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const RealMatrix X = gen::gaussian(rng, gen::uniform_int(rng, 2, 4), gen::uniform_int(rng, 4, 12));
        const L1Result r = l1pc_optimal(X);
        const RealVector z = X.transpose() * (X * r.sign_vector.to_vector());
        for (Eigen::Index i = 0; i < z.size(); ++i)
            if (z(i) != 0.0) EXPECT_EQ(z(i) > 0 ? 1 : -1, r.sign_vector[static_cast<std::size_t>(i)]);
    }
}

TEST(L1pcOptimal, ZeroThrows) { EXPECT_THROW(l1pc_optimal(RealMatrix::Zero(2, 4)), ZeroMatrix); }

TEST(Rank1Approx, Examples) {
    const RealVector r = rank1_approx_component(x_rank1());
    EXPECT_LE((r - l1pc_optimal(x_rank1()).component).norm(), 1e-14);

    const RealVector s = rank1_approx_component(x_small());
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
    EXPECT_LE((x_small().transpose() * s).lpNorm<1>(), 2 * std::sqrt(2.0) + 1e-12);

    const RealVector id = rank1_approx_component(RealMatrix::Identity(2, 2));
    EXPECT_NEAR(std::abs(id(0)), 1 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(std::abs(id(1)), 1 / std::sqrt(2.0), 1e-14);
}

TEST(Rank1Approx, ZeroThrows) { EXPECT_THROW(rank1_approx_component(RealMatrix::Zero(3, 3)), ZeroMatrix); }

TEST(Dominance, OptimumBeatsL2AndRankOneApproximation) {
    std::mt19937_64 rng(44);
    for (int t = 0; t < 100; ++t) {
        const RealMatrix X = gen::gaussian(rng, gen::uniform_int(rng, 2, 5), gen::uniform_int(rng, 5, 14));
        const double opt = l1pc_optimal(X).objective;
        const RealVector r2 = l2_subspace(X, 1).R.col(0);
        EXPECT_GE(opt, (X.transpose() * r2).lpNorm<1>() - 1e-12 * opt);
        EXPECT_GE(opt, (X.transpose() * rank1_approx_component(X)).lpNorm<1>() - 1e-12 * opt);
    }
}

TEST(L1pcOptimal, DegenerateArrangementStillOptimal) {
    // samples 3/5 and 1/6 are antiparallel, so Q has coincident hyperplanes
    RealMatrix X(2, 6);
    X << 0, -2, 1, 1, -1, 0, -2, 0, 1, 0, -1, 2;
    const CandidateSet literal = compute_candidates(build_q(X));
    EXPECT_GT(literal.coincident_entries, 0u);
    SolverOptions o;
    o.exhaustive_cap = 0;
    const L1Result r = l1pc_optimal(X, o);
    const double ref = oracle::max_sign_projection_canonical(X);
    EXPECT_NEAR(ref, std::sqrt(61.0), 1e-12);
    EXPECT_NEAR(r.sign_value, ref, 1e-12);
}

TEST(L1pcOptimal, ZeroAndDuplicateSamplesStillOptimal) {
    std::mt19937_64 rng(91);
    for (int t = 0; t < 100; ++t) {
        RealMatrix X = gen::gaussian(rng, 3, 10);
        X.col(2).setZero();
        X.col(7) = X.col(4);
        X.col(9) = -2.0 * X.col(1);
        SolverOptions o;
        o.exhaustive_cap = 0;
        const double ref = oracle::max_sign_projection_canonical(X);
        EXPECT_NEAR(l1pc_optimal(X, o).sign_value, ref, 1e-9 * ref);
    }
}
