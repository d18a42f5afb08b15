#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "l1pca/errors.hpp"

namespace l1pca {

/// A vector with entries in {-1, +1}. Ordering is lexicographic with -1 < +1.
class SignVector {
public:
    SignVector() = default;
    explicit SignVector(std::size_t n, std::int8_t fill = 1) : s_(n, fill) { check(fill); }
    SignVector(std::initializer_list<int> entries) {
        s_.reserve(entries.size());
        for (int e : entries) push_back(e);
    }

    /// Entries of v with v_i >= 0 mapped to +1.
    static SignVector from_signs(const Eigen::Ref<const Eigen::VectorXd>& v) {
        SignVector b;
        b.s_.resize(static_cast<std::size_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) b.s_[static_cast<std::size_t>(i)] = v(i) < 0.0 ? -1 : 1;
        return b;
    }

    std::size_t size() const noexcept { return s_.size(); }
    int operator[](std::size_t i) const { return s_[i]; }

    void set(std::size_t i, int value) {
        check(value);
        s_[i] = static_cast<std::int8_t>(value);
    }
    void push_back(int value) {
        check(value);
        s_.push_back(static_cast<std::int8_t>(value));
    }
    void flip(std::size_t i) { s_[i] = static_cast<std::int8_t>(-s_[i]); }

    bool is_canonical() const noexcept { return s_.empty() || s_.front() == 1; }

    /// Negates the whole vector when its first entry is -1.
    SignVector& canonicalize() noexcept {
        if (!is_canonical())
            for (auto& e : s_) e = static_cast<std::int8_t>(-e);
        return *this;
    }
    SignVector canonical() const {
        SignVector c = *this;
        return c.canonicalize();
    }

    Eigen::VectorXd to_vector() const {
        Eigen::VectorXd v(static_cast<Eigen::Index>(s_.size()));
        for (std::size_t i = 0; i < s_.size(); ++i) v(static_cast<Eigen::Index>(i)) = s_[i];
        return v;
    }

    std::string to_string() const {
        std::string out;
        out.reserve(s_.size());
        for (auto e : s_) out.push_back(e > 0 ? '+' : '-');
        return out;
    }

    const std::vector<std::int8_t>& entries() const noexcept { return s_; }

    friend bool operator==(const SignVector&, const SignVector&) = default;
    friend auto operator<=>(const SignVector& a, const SignVector& b) { return a.s_ <=> b.s_; }

private:
    static void check(int value) {
        if (value != 1 && value != -1)
            throw InvalidArgument("sign entries must be -1 or +1, got " + std::to_string(value));
    }

    std::vector<std::int8_t> s_;
};

/// N x K matrix with entries in {-1, +1}, stored as K sign columns.
class SignMatrix {
public:
    SignMatrix() = default;
    explicit SignMatrix(std::vector<SignVector> columns) : cols_(std::move(columns)) {
        for (const auto& c : cols_)
            if (c.size() != cols_.front().size()) throw DimensionMismatch("sign columns differ in length");
    }

    std::size_t rows() const noexcept { return cols_.empty() ? 0 : cols_.front().size(); }
    std::size_t cols() const noexcept { return cols_.size(); }
    const SignVector& col(std::size_t k) const { return cols_[k]; }
    int operator()(std::size_t i, std::size_t k) const { return cols_[k][i]; }

    Eigen::MatrixXd to_matrix() const {
        Eigen::MatrixXd B(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
        for (std::size_t k = 0; k < cols_.size(); ++k) B.col(static_cast<Eigen::Index>(k)) = cols_[k].to_vector();
        return B;
    }

    friend bool operator==(const SignMatrix&, const SignMatrix&) = default;

private:
    std::vector<SignVector> cols_;
};

struct SignVectorHash {
    std::size_t operator()(const SignVector& b) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto e : b.entries()) {
            h ^= static_cast<std::size_t>(e > 0);
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace l1pca
