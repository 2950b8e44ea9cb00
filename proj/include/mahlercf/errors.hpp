#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mahlercf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DivisionByZeroPoly : public Error {
public:
    DivisionByZeroPoly() : Error("polynomial division by zero") {}
};

class ZeroPolynomial : public Error {
public:
    ZeroPolynomial() : Error("operation undefined for the zero polynomial") {}
};

/// The exactly-known part of a series is too short to decide the result.
/// Callers regenerate the series with a lower floor and retry.
class InsufficientPrecision : public Error {
public:
    using Error::Error;
};

class ZeroSoFarDivision : public Error {
public:
    ZeroSoFarDivision() : Error("divisor series is indistinguishable from zero above its floor") {}
};

class MismatchAt : public Error {
public:
    MismatchAt(std::int64_t degree, const std::string& what)
        : Error(what + ": coefficient mismatch at degree " + std::to_string(degree)), degree_(degree) {}
    std::int64_t degree() const noexcept { return degree_; }

private:
    std::int64_t degree_;
};

class RateViolation : public Error {
public:
    using Error::Error;
};

class ClassificationFailure : public Error {
public:
    explicit ClassificationFailure(std::size_t m)
        : Error("no transport source found for convergent " + std::to_string(m)), index_(m) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Monic denominators stop following the two-term recurrence shape at `index`.
class ShapeViolation : public Error {
public:
    ShapeViolation(std::size_t index, const std::string& what)
        : Error("recurrence shape violated at index " + std::to_string(index) + ": " + what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class ZeroDenominator : public Error {
public:
    using Error::Error;
};

class IdentityFailure : public Error {
public:
    IdentityFailure(const std::string& name, std::int64_t k)
        : Error("identity " + name + " fails at k=" + std::to_string(k)), k_(k) {}
    std::int64_t k() const noexcept { return k_; }

private:
    std::int64_t k_;
};

class NotCoprime : public Error {
public:
    using Error::Error;
};

class HypothesisFailed : public Error {
public:
    using Error::Error;
};

class ScaleNotInvertible : public Error {
public:
    using Error::Error;
};

class SearchExhausted : public Error {
public:
    explicit SearchExhausted(std::uint64_t cap)
        : Error("Hensel search exhausted after cap " + std::to_string(cap)), cap_(cap) {}
    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t cap_;
};

class PrecisionCascade : public Error {
public:
    using Error::Error;
};

}  // namespace mahlercf
