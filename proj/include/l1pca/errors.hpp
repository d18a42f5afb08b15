#pragma once

#include <stdexcept>
#include <string>

namespace l1pca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The input matrix has no nonzero entry, so no compact factorization exists.
class ZeroMatrix : public Error {
public:
    ZeroMatrix() : Error("matrix is identically zero") {}
    explicit ZeroMatrix(const std::string& what) : Error(what) {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An exhaustive search would exceed its configured enumeration cap.
class CapExceeded : public Error {
public:
    CapExceeded(std::string cap_name, long long requested, long long cap)
        : Error(cap_name + " exceeded: requested " + std::to_string(requested) +
                ", cap is " + std::to_string(cap)),
          cap_name_(std::move(cap_name)),
          requested_(requested),
          cap_(cap) {}

    const std::string& cap_name() const noexcept { return cap_name_; }
    long long requested() const noexcept { return requested_; }
    long long cap() const noexcept { return cap_; }

private:
    std::string cap_name_;
    long long requested_;
    long long cap_;
};

/// X sgn(q) vanished, so the rank-one approximation has no direction.
class DegenerateProjection : public Error {
public:
    DegenerateProjection() : Error("projection X*sgn(q1) is zero") {}
};

/// Deflation ran out of rank before producing the requested components.
class RankExhausted : public Error {
public:
    using Error::Error;
};

}  // namespace l1pca
