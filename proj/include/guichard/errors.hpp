#pragma once

#include <array>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace guichard {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Complete elliptic integral at k = 1.
class DivergenceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Input constants violate a structural relation of a solution family.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation does not apply to the given object (wrong family, unsupported regime).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A metric coefficient vanished where the equations divide by it.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, const std::array<double, 3>& point)
        : std::runtime_error(what), point_(point) {}

    const std::array<double, 3>& point() const noexcept { return point_; }

private:
    std::array<double, 3> point_;
};

/// Integration left the positive-metric region before covering the requested interval.
class DomainShrunkError : public DomainError {
public:
    DomainShrunkError(const std::string& what, double admissible_lo, double admissible_hi)
        : DomainError(what), lo_(admissible_lo), hi_(admissible_hi) {}

    double admissible_lo() const noexcept { return lo_; }
    double admissible_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// Parse failure in the symbolic grammar; offset is a 0-based character index.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownAtomError : public std::runtime_error {
public:
    UnknownAtomError(const std::string& name, std::size_t offset)
        : std::runtime_error("unknown atom '" + name + "' at offset " + std::to_string(offset)),
          name_(name), offset_(offset) {}

    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace detail {

inline std::string format_point(const std::array<double, 3>& p) {
    std::ostringstream os;
    os.precision(17);
    os << '(' << p[0] << ", " << p[1] << ", " << p[2] << ')';
    return os.str();
}

} // namespace detail
} // namespace guichard
