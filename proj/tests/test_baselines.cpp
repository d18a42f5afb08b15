#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "l1pca/baselines.hpp"
#include "l1pca/l1_multi.hpp"
#include "support/oracles.hpp"

using namespace l1pca;

TEST(L2Subspace, Examples) {
    RealMatrix X(2, 2);
    X << 3, 0, 0, 1;
    SubspaceBasis b = l2_subspace(X, 1);
    EXPECT_NEAR(std::abs(b.R(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(b.R(1, 0), 0.0, 1e-14);

    X << 1, 2, 2, 4;
    b = l2_subspace(X, 1);
    EXPECT_NEAR(std::abs(b.R.col(0).dot(Eigen::Vector2d(1, 2)) / std::sqrt(5.0)), 1.0, 1e-14);
    EXPECT_THROW(l2_subspace(X, 2), InvalidArgument);
}

TEST(L2Subspace, FullBasisPreservesFrobenius) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        const int D = gen::uniform_int(rng, 1, 6);
        const RealMatrix X = gen::gaussian(rng, D, D + gen::uniform_int(rng, 0, 6));
        const SubspaceBasis b = l2_subspace(X, D);
        EXPECT_LE(orthonormality_error(b.R), 1e-10);
        EXPECT_NEAR(l2_projection(b.R, X), X.norm(), 1e-10 * X.norm());
    }
}

TEST(L2Subspace, MaximizesEnergyAgainstRandomBases) {
    std::mt19937_64 rng(2);
    const RealMatrix X = gen::gaussian(rng, 4, 12);
    const double best = l2_projection(l2_subspace(X, 2).R, X);
    for (int k = 0; k < 200; ++k) EXPECT_LE(l2_projection(gen::orthonormal(rng, 4, 2), X), best + 1e-12);
}

TEST(FixedPoint, StartingAtOptimumConvergesImmediately) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const RealMatrix X = gen::gaussian(rng, 3, gen::uniform_int(rng, 4, 12));
        const L1Result opt = l1pc_optimal(X);
        const FixedPointResult fp = fixed_point_l1(X, opt.sign_vector, 10);
        EXPECT_TRUE(fp.converged);
        EXPECT_LE(fp.iterations, 1);
        EXPECT_EQ(fp.sign_vector, opt.sign_vector);
    }
}

TEST(FixedPoint, SmallExampleBoundedByOptimum) {
    RealMatrix X(2, 3);
    X << 1, 0, 1, 0, 1, 1;
    const FixedPointResult fp = fixed_point_l1(X, SignVector{1, -1, -1}, 100);
    EXPECT_TRUE(fp.converged);
    EXPECT_LE(fp.value, std::sqrt(8.0) + 1e-14);
    EXPECT_TRUE(fp.sign_vector.is_canonical());
}

TEST(FixedPoint, RankOneConvergesToSignOfQ) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const RealVector u = gen::gaussian(rng, 3, 1);
        const RealVector v = gen::gaussian(rng, 9, 1);
        const RealMatrix X = u * v.transpose();
        SignVector b0 = sign_quantize(gen::gaussian(rng, 9, 1));
        if (v.dot(b0.to_vector()) == 0.0) continue;
        const FixedPointResult fp = fixed_point_l1(X, b0, 20);
        EXPECT_TRUE(fp.converged);
        EXPECT_EQ(fp.sign_vector, sign_quantize(v).canonical());
    }
}

TEST(FixedPoint, RejectsBadArguments) {
    EXPECT_THROW(fixed_point_l1(RealMatrix::Ones(2, 3), SignVector{1, 1, 1}, 0), InvalidArgument);
    EXPECT_THROW(fixed_point_l1(RealMatrix::Ones(2, 3), SignVector{1, 1}, 5), DimensionMismatch);
}

TEST(FixedPoint, ObjectiveNondecreasingAlongIterates) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        const RealMatrix X = gen::gaussian(rng, gen::uniform_int(rng, 2, 5), gen::uniform_int(rng, 3, 14));
        SignVector b = sign_quantize(gen::gaussian(rng, X.cols(), 1));
        double prev = (X * b.to_vector()).norm();
        for (int it = 0; it < 50; ++it) {
            const FixedPointResult step = fixed_point_l1(X, b, 1);
            EXPECT_GE(step.value, prev - 1e-12 * prev);
            prev = step.value;
            if (step.converged) break;
            b = step.sign_vector;
        }
    }
}

TEST(FixedPoint, MultistartIsDeterministicAndDominated) {
    std::mt19937_64 rng(6);
    const RealMatrix X = gen::gaussian(rng, 3, 10);
    const MultistartResult a = fixed_point_multistart(X, 8, 42);
    const MultistartResult b = fixed_point_multistart(X, 8, 42);
    EXPECT_EQ(a.best.sign_vector, b.best.sign_vector);
    EXPECT_EQ(a.values.size(), 9u);
    EXPECT_LE(a.best.value, l1pc_optimal(X).sign_value + 1e-12);
}

TEST(GreedyDeflation, KOneMatchesOptimal) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 30; ++t) {
        const RealMatrix X = gen::gaussian(rng, 3, 8);
        const RealVector r = greedy_deflation_l1(X, 1).R.col(0);
        EXPECT_LE((r - l1pc_optimal(X).component).norm(), 1e-12);
    }
}

TEST(GreedyDeflation, IdentityK2ReachesJointOptimum) {
    const SubspaceBasis b = greedy_deflation_l1(RealMatrix::Identity(2, 2), 2);
    EXPECT_NEAR(l1_projection(b.R, RealMatrix::Identity(2, 2)), 2 * std::sqrt(2.0), 1e-12);
}

TEST(GreedyDeflation, OrthonormalAndDominatedByJointOptimum) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
        const RealMatrix X = gen::gaussian(rng, 4, 6);
        const SubspaceBasis b = greedy_deflation_l1(X, 3);
        EXPECT_LE(orthonormality_error(b.R), 1e-10);
        const RealMatrix R2 = greedy_deflation_l1(X, 2).R;
        const double joint = l1_multi_optimal(X, 2).objective;
        EXPECT_LE(l1_projection(R2, X), joint + 1e-12 * joint);
    }
}

TEST(GreedyDeflation, FixedPointStageIsOrthonormal) {
    std::mt19937_64 rng(9);
    DeflationOptions o;
    o.stage = DeflationStage::fixed_point;
    o.seed = 5;
    const RealMatrix X = gen::gaussian(rng, 5, 30);
    EXPECT_LE(orthonormality_error(greedy_deflation_l1(X, 4, o).R), 1e-10);
}

TEST(GreedyDeflation, RankExhausted) {
    RealMatrix X(3, 4);
    X << 1, 2, 3, 4, 2, 4, 6, 8, 0, 0, 0, 0;
    EXPECT_THROW(greedy_deflation_l1(X, 2), InvalidArgument);
}
