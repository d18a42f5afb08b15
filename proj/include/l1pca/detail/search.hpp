#pragma once

// Helpers shared by the exhaustive and candidate searches: deterministic
// argmax bookkeeping and a chunked parallel loop over an index range.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace l1pca::detail {

/// Relative tolerance under which two objective values count as a tie.
inline constexpr double kTieRelTol = 1e-12;

/// Running argmax. Among (near-)equal values the smaller key wins, so the
/// outcome does not depend on the order in which offers arrive.
template <class Key>
struct BestOf {
    double value = -std::numeric_limits<double>::infinity();
    Key key{};
    bool found = false;

    void offer(double v, const Key& k) {
        if (!found) {
            value = v;
            key = k;
            found = true;
            return;
        }
        const double tol = kTieRelTol * std::max(std::abs(value), std::abs(v));
        if (v > value + tol || (v >= value - tol && k < key)) {
            value = std::max(v, value);
            key = k;
        }
    }

    void merge(const BestOf& other) {
        if (other.found) offer(other.value, other.key);
    }
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, total) into contiguous chunks and runs body(lo, hi, worker)
/// on up to `threads` workers. Returns after every chunk has finished.
template <class Body>
void parallel_chunks(std::uint64_t total, unsigned threads, Body&& body) {
    threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(total, 1)));
    if (threads <= 1) {
        body(std::uint64_t{0}, total, 0u);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    pool.reserve(threads);
    const std::uint64_t step = (total + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::uint64_t lo = std::min(total, step * w);
        const std::uint64_t hi = std::min(total, lo + step);
        pool.emplace_back([&body, &errors, lo, hi, w] {
            try {
                body(lo, hi, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace l1pca::detail
