#pragma once

// Seeded synthetic studies: outlier-robust dimensionality reduction on 2-D
// Gaussian data, and MUSIC direction finding on a uniform linear array with
// one jammed snapshot. Every result is a pure function of (config, seed).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "l1pca/baselines.hpp"
#include "l1pca/detail/search.hpp"
#include "l1pca/errors.hpp"
#include "l1pca/l1_multi.hpp"
#include "l1pca/l1_single.hpp"
#include "l1pca/numlin.hpp"
#include "l1pca/subspace.hpp"

namespace l1pca {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Seeding

/// Named random substreams. Each (seed, trial, stream) triple maps to an
/// independent generator state.
enum class Stream : std::uint64_t { train = 1, eval = 2, signal = 3, noise = 4, jammer = 5, phase = 6 };

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t trial, Stream stream) {
    const std::uint64_t s = splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ static_cast<std::uint64_t>(stream));
    return std::mt19937_64(s);
}

// ---------------------------------------------------------------------------
// Dimensionality reduction

struct DrConfig {
    int n_train = 50;
    RealVector mean = RealVector::Zero(2);
    RealMatrix cov = (RealMatrix(2, 2) << 15.0, 13.0, 13.0, 26.0).finished();
    // Bottom-right of the nominal cloud, oblique to both principal axes.
    std::vector<RealVector> outliers = {(RealVector(2) << 20.0, -5.0).finished(),
                                        (RealVector(2) << 21.0, -4.0).finished(),
                                        (RealVector(2) << 22.0, -6.0).finished()};
    int n_eval = 1000;
    std::uint64_t seed = 0;
};

inline void validate(const DrConfig& c) {
    if (c.n_train < 1 || c.n_eval < 1) throw InvalidArgument("n_train and n_eval must be positive");
    const Eigen::Index D = c.mean.size();
    if (D < 1) throw InvalidArgument("mean must be non-empty");
    if (c.cov.rows() != D || c.cov.cols() != D) throw DimensionMismatch("cov must be D x D");
    if (!c.cov.allFinite() || !c.mean.allFinite()) throw InvalidArgument("non-finite mean or cov");
    if ((c.cov - c.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * c.cov.cwiseAbs().maxCoeff())
        throw InvalidArgument("cov is not symmetric");
    Eigen::LLT<RealMatrix> llt(c.cov);
    if (llt.info() != Eigen::Success) throw InvalidArgument("cov is not positive definite");
    for (const auto& o : c.outliers)
        if (o.size() != D) throw DimensionMismatch("outlier dimension differs from data dimension");
}

namespace detail {

inline RealMatrix draw_gaussian(std::mt19937_64& rng, const RealVector& mean, const RealMatrix& chol_lower, int n) {
    std::normal_distribution<double> normal;
    RealMatrix Z(mean.size(), n);
    for (Eigen::Index j = 0; j < Z.cols(); ++j)
        for (Eigen::Index i = 0; i < Z.rows(); ++i) Z(i, j) = normal(rng);
    return (chol_lower * Z).colwise() + mean;
}

}  // namespace detail

/// Training and evaluation samples (as columns) from N(mean, cov).
inline std::pair<RealMatrix, RealMatrix> gen_gaussian(const DrConfig& c, std::uint64_t trial = 0) {
    validate(c);
    const RealMatrix L = Eigen::LLT<RealMatrix>(c.cov).matrixL();
    auto train_rng = substream(c.seed, trial, Stream::train);
    auto eval_rng = substream(c.seed, trial, Stream::eval);
    return {detail::draw_gaussian(train_rng, c.mean, L, c.n_train),
            detail::draw_gaussian(eval_rng, c.mean, L, c.n_eval)};
}

/// [X, o_1, ..., o_m].
inline RealMatrix inject_outliers(const RealMatrix& X, const std::vector<RealVector>& outliers) {
    RealMatrix out(X.rows(), X.cols() + static_cast<Eigen::Index>(outliers.size()));
    out.leftCols(X.cols()) = X;
    for (std::size_t k = 0; k < outliers.size(); ++k) {
        if (outliers[k].size() != X.rows()) throw DimensionMismatch("outlier dimension differs from data dimension");
        out.col(X.cols() + static_cast<Eigen::Index>(k)) = outliers[k];
    }
    return out;
}

/// (1/n) sum_i ||x_i - r r^T x_i||^2 for unit r.
inline double mean_square_fit_error(const RealMatrix& X_eval, const RealVector& r) {
    if (r.size() != X_eval.rows()) throw DimensionMismatch("r dimension differs from data dimension");
    if (std::abs(r.norm() - 1.0) > 1e-9) throw InvalidArgument("r must have unit norm");
    const RealMatrix residual = X_eval - r * (r.transpose() * X_eval);
    return residual.squaredNorm() / static_cast<double>(X_eval.cols());
}

struct DrTrial {
    RealVector r_l2_clean, r_l1_clean, r_l2_corrupt, r_l1_corrupt;
    double err_l2_clean = 0.0, err_l1_clean = 0.0, err_l2_corrupt = 0.0, err_l1_corrupt = 0.0;
};

inline DrTrial run_dr_trial(const DrConfig& c, std::uint64_t trial) {
    auto [X, X_eval] = gen_gaussian(c, trial);
    const RealMatrix X_crpt = inject_outliers(X, c.outliers);

    DrTrial t;
    t.r_l2_clean = l2_subspace(X, 1).R.col(0);
    t.r_l1_clean = l1pc_optimal(X).component;
    t.r_l2_corrupt = l2_subspace(X_crpt, 1).R.col(0);
    t.r_l1_corrupt = l1pc_optimal(X_crpt).component;
    t.err_l2_clean = mean_square_fit_error(X_eval, t.r_l2_clean);
    t.err_l1_clean = mean_square_fit_error(X_eval, t.r_l1_clean);
    t.err_l2_corrupt = mean_square_fit_error(X_eval, t.r_l2_corrupt);
    t.err_l1_corrupt = mean_square_fit_error(X_eval, t.r_l1_corrupt);
    return t;
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& v) {
    MeanStderr m;
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return m;
}

struct DrSummary {
    std::vector<DrTrial> trials;
    MeanStderr l2_clean, l1_clean, l2_corrupt, l1_corrupt;
    double l1_wins_corrupt = 0.0;  // fraction of trials with err_l1_corrupt < err_l2_corrupt
};

inline DrSummary run_dr_experiment(const DrConfig& c, int trials, unsigned threads = 1) {
    validate(c);
    if (trials < 1) throw InvalidArgument("trials must be positive");
    DrSummary s;
    s.trials.resize(static_cast<std::size_t>(trials));
    detail::parallel_chunks(static_cast<std::uint64_t>(trials), threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
        for (std::uint64_t t = lo; t < hi; ++t) s.trials[t] = run_dr_trial(c, t);
    });
    std::vector<double> a, b, e, f;
    int wins = 0;
    for (const auto& t : s.trials) {
        a.push_back(t.err_l2_clean);
        b.push_back(t.err_l1_clean);
        e.push_back(t.err_l2_corrupt);
        f.push_back(t.err_l1_corrupt);
        wins += t.err_l1_corrupt < t.err_l2_corrupt;
    }
    s.l2_clean = mean_stderr(a);
    s.l1_clean = mean_stderr(b);
    s.l2_corrupt = mean_stderr(e);
    s.l1_corrupt = mean_stderr(f);
    s.l1_wins_corrupt = static_cast<double>(wins) / static_cast<double>(trials);
    return s;
}

// ---------------------------------------------------------------------------
// Direction of arrival

struct DoaConfig {
    int n_elements = 5;
    int n_snapshots = 10;
    std::vector<double> thetas = {-30.0, 50.0};  // degrees
    std::vector<double> snrs_db = {2.0, 3.0};
    bool jammer = true;
    double jammer_theta = 20.0;
    double jammer_snr_db = 3.0;
    std::optional<int> corrupt_index;  // 1-based; drawn per trial when empty
    double noise_var = 1.0;
    double grid_step = 0.1;            // degrees
    bool random_phase = false;
    int K = 2;
    double success_window = 3.0;       // degrees
    double peak_separation = 5.0;      // degrees
    double jammer_window = 1.0;        // degrees
    std::uint64_t seed = 0;
};

inline void validate(const DoaConfig& c) {
    if (c.n_elements < 2) throw InvalidArgument("n_elements must be at least 2");
    if (c.n_snapshots < 1) throw InvalidArgument("n_snapshots must be at least 1");
    if (c.thetas.empty()) throw InvalidArgument("at least one source angle is required");
    if (c.thetas.size() != c.snrs_db.size()) throw InvalidArgument("thetas and snrs_db differ in length");
    auto in_range = [](double a) { return a > -90.0 && a < 90.0; };
    for (double t : c.thetas)
        if (!in_range(t)) throw InvalidArgument("source angles must lie in (-90, 90)");
    if (!in_range(c.jammer_theta)) throw InvalidArgument("jammer angle must lie in (-90, 90)");
    if (c.corrupt_index && (*c.corrupt_index < 1 || *c.corrupt_index > c.n_snapshots))
        throw InvalidArgument("corrupt_index must lie in 1..n_snapshots");
    if (!(c.noise_var >= 0.0)) throw InvalidArgument("noise_var must be nonnegative");
    if (!(c.grid_step > 0.0 && c.grid_step < 90.0)) throw InvalidArgument("grid_step must lie in (0, 90)");
    if (c.K < 1 || c.K > 2 * c.n_elements) throw InvalidArgument("K must lie in 1..2*n_elements");
}

/// Half-wavelength ULA response, phase reference at element 0.
inline ComplexVector steering_vector(double theta_deg, int D) {
    const double phase = std::numbers::pi * std::sin(theta_deg * std::numbers::pi / 180.0);
    ComplexVector s(D);
    for (int k = 0; k < D; ++k) s(k) = std::polar(1.0, phase * k);
    return s;
}

/// Amplitude for a given SNR. The noise level is the reference; a noise-free
/// configuration uses unit reference power instead.
inline double amplitude_for_snr(double snr_db, double noise_var) {
    const double ref = noise_var > 0.0 ? std::sqrt(noise_var) : 1.0;
    return ref * std::pow(10.0, snr_db / 20.0);
}

inline ComplexMatrix gen_doa_snapshots(const DoaConfig& c, std::uint64_t trial = 0) {
    validate(c);
    const int D = c.n_elements, N = c.n_snapshots;
    ComplexMatrix X = ComplexMatrix::Zero(D, N);
    auto phase_rng = substream(c.seed, trial, Stream::phase);
    std::uniform_real_distribution<double> uniform_phase(0.0, 2.0 * std::numbers::pi);
    for (std::size_t m = 0; m < c.thetas.size(); ++m) {
        const ComplexVector s = steering_vector(c.thetas[m], D) * amplitude_for_snr(c.snrs_db[m], c.noise_var);
        for (int n = 0; n < N; ++n) {
            const std::complex<double> g = c.random_phase ? std::polar(1.0, uniform_phase(phase_rng)) : 1.0;
            X.col(n) += g * s;
        }
    }
    if (c.noise_var > 0.0) {
        auto rng = substream(c.seed, trial, Stream::noise);
        std::normal_distribution<double> normal(0.0, std::sqrt(c.noise_var / 2.0));
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < D; ++k) {
                const double re = normal(rng);
                const double im = normal(rng);
                X(k, n) += std::complex<double>(re, im);
            }
    }
    return X;
}

/// Column (1-based) that receives the jammer in a given trial.
inline int jammer_column(const DoaConfig& c, std::uint64_t trial) {
    if (c.corrupt_index) return *c.corrupt_index;
    auto rng = substream(c.seed, trial, Stream::jammer);
    return std::uniform_int_distribution<int>(1, c.n_snapshots)(rng);
}

/// Adds A_J s_{theta_J} to the given 1-based column.
inline ComplexMatrix inject_jammer(const ComplexMatrix& Xc, const DoaConfig& c, int column) {
    if (column < 1 || column > Xc.cols())
        throw InvalidArgument("jammer column " + std::to_string(column) + " out of range 1.." +
                              std::to_string(Xc.cols()));
    ComplexMatrix out = Xc;
    out.col(column - 1) += amplitude_for_snr(c.jammer_snr_db, c.noise_var) *
                           steering_vector(c.jammer_theta, static_cast<int>(Xc.rows()));
    return out;
}

/// Real parts stacked over imaginary parts.
inline RealMatrix realify(const ComplexMatrix& Xc) {
    RealMatrix out(2 * Xc.rows(), Xc.cols());
    out.topRows(Xc.rows()) = Xc.real();
    out.bottomRows(Xc.rows()) = Xc.imag();
    return out;
}

struct Spectrum {
    std::vector<double> angles;  // degrees
    std::vector<double> power;
};

inline constexpr double kSpectrumClamp = 1e-12;

/// Open grid over (-90, 90) with the configured step.
inline std::vector<double> angle_grid(double step) {
    const auto count = static_cast<long>(std::llround(180.0 / step)) - 1;
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(std::max(0L, count)));
    for (long k = 1; k <= count; ++k) {
        const double a = -90.0 + static_cast<double>(k) * step;
        if (a > -90.0 && a < 90.0) g.push_back(a);
    }
    return g;
}

/// P(theta) = 1 / (s~^T (I - R R^T) s~) on the grid, denominators clamped at 1e-12.
inline Spectrum music_spectrum(const RealMatrix& R, const DoaConfig& c) {
    const int D = c.n_elements;
    if (R.rows() != 2 * D) throw DimensionMismatch("basis must have 2*n_elements rows");
    if (orthonormality_error(R) > 1e-8) throw InvalidArgument("basis is not orthonormal");

    Spectrum sp;
    sp.angles = angle_grid(c.grid_step);
    sp.power.reserve(sp.angles.size());
    for (double theta : sp.angles) {
        const RealVector s = realify(steering_vector(theta, D));
        const double energy = s.squaredNorm();
        const double residual = energy - (R.transpose() * s).squaredNorm();
        if (residual < -1e-9 * energy || residual > energy * (1.0 + 1e-9))
            throw InvalidArgument("projector residual outside [0, ||s||^2]");
        sp.power.push_back(1.0 / std::max(residual, kSpectrumClamp));
    }
    return sp;
}

/// Strongest local maxima, greedily accepted at least min_separation apart.
inline std::vector<double> top_peaks(const Spectrum& sp, int k, double min_separation) {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    const auto& p = sp.power;
    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (!(p[i] > p[i - 1])) continue;
        std::size_t j = i + 1;  // walk a plateau
        while (j < p.size() && p[j] == p[i]) ++j;
        if (j < p.size() && p[j] < p[i]) maxima.push_back(i);
    }
    std::stable_sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });

    std::vector<double> out;
    for (std::size_t i : maxima) {
        if (static_cast<int>(out.size()) == k) break;
        const double a = sp.angles[i];
        const bool far = std::all_of(out.begin(), out.end(), [&](double b) { return std::abs(a - b) >= min_separation; });
        if (far) out.push_back(a);
    }
    return out;
}

/// True when each target angle has its own peak within `window` degrees.
inline bool peaks_match(const std::vector<double>& peaks, const std::vector<double>& targets, double window) {
    if (peaks.size() < targets.size()) return false;
    std::vector<bool> used(peaks.size(), false);
    for (double t : targets) {
        std::size_t best = peaks.size();
        for (std::size_t i = 0; i < peaks.size(); ++i)
            if (!used[i] && std::abs(peaks[i] - t) <= window &&
                (best == peaks.size() || std::abs(peaks[i] - t) < std::abs(peaks[best] - t)))
                best = i;
        if (best == peaks.size()) return false;
        used[best] = true;
    }
    return true;
}

/// Mean of P over grid angles within `window` of `center`.
inline double window_mean(const Spectrum& sp, double center, double window) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < sp.angles.size(); ++i)
        if (std::abs(sp.angles[i] - center) <= window + 1e-9) {
            sum += sp.power[i];
            ++n;
        }
    return n > 0 ? sum / n : 0.0;
}

struct DoaTrial {
    int corrupt_column = 0;  // 1-based, 0 when the jammer is off
    Spectrum l2, l1;
    std::vector<double> peaks_l2, peaks_l1;
    bool success_l2 = false, success_l1 = false;
    double jammer_power_l2 = 0.0, jammer_power_l1 = 0.0;
    double objective_l1 = 0.0;  // ||R_L1^T X~||_1
    bool l1_rank_deficient = false;
};

inline DoaTrial run_doa_trial(const DoaConfig& c, std::uint64_t trial, const MultiOptions& opts = {}) {
    validate(c);
    ComplexMatrix Xc = gen_doa_snapshots(c, trial);
    DoaTrial t;
    if (c.jammer) {
        t.corrupt_column = jammer_column(c, trial);
        Xc = inject_jammer(Xc, c, t.corrupt_column);
    }
    const RealMatrix X = realify(Xc);

    const SubspaceBasis r2 = l2_subspace(X, c.K);
    const MultiResult r1 = l1_multi_optimal(X, c.K, opts);
    t.objective_l1 = r1.objective;
    t.l1_rank_deficient = r1.basis.rank_deficient_completion;

    t.l2 = music_spectrum(r2.R, c);
    t.l1 = music_spectrum(r1.basis.R, c);
    const int n_src = static_cast<int>(c.thetas.size());
    t.peaks_l2 = top_peaks(t.l2, n_src, c.peak_separation);
    t.peaks_l1 = top_peaks(t.l1, n_src, c.peak_separation);
    t.success_l2 = peaks_match(t.peaks_l2, c.thetas, c.success_window);
    t.success_l1 = peaks_match(t.peaks_l1, c.thetas, c.success_window);
    t.jammer_power_l2 = window_mean(t.l2, c.jammer_theta, c.jammer_window);
    t.jammer_power_l1 = window_mean(t.l1, c.jammer_theta, c.jammer_window);
    return t;
}

struct DoaSummary {
    std::vector<DoaTrial> trials;
    double success_rate_l2 = 0.0, success_rate_l1 = 0.0;
    MeanStderr jammer_power_l2, jammer_power_l1;
};

inline DoaSummary run_doa_experiment(const DoaConfig& c, int trials, const MultiOptions& opts = {},
                                     unsigned threads = 1) {
    validate(c);
    if (trials < 1) throw InvalidArgument("trials must be positive");
    DoaSummary s;
    s.trials.resize(static_cast<std::size_t>(trials));
    detail::parallel_chunks(static_cast<std::uint64_t>(trials), threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
        for (std::uint64_t t = lo; t < hi; ++t) s.trials[t] = run_doa_trial(c, t, opts);
    });
    int ok2 = 0, ok1 = 0;
    std::vector<double> j2, j1;
    for (const auto& t : s.trials) {
        ok2 += t.success_l2;
        ok1 += t.success_l1;
        j2.push_back(t.jammer_power_l2);
        j1.push_back(t.jammer_power_l1);
    }
    s.success_rate_l2 = static_cast<double>(ok2) / trials;
    s.success_rate_l1 = static_cast<double>(ok1) / trials;
    s.jammer_power_l2 = mean_stderr(j2);
    s.jammer_power_l1 = mean_stderr(j1);
    return s;
}

}  // namespace l1pca
