#ifndef DARBOUX_ERRORS_HPP
#define DARBOUX_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace darboux {

/// Malformed expression text. `offset()` is the byte offset of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation outside the real domain of a subexpression (ln(0), sqrt(-1), 1/0, ...).
class DomainError : public std::domain_error {
public:
    DomainError(const std::string& what, std::string subexpr)
        : std::domain_error(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}
    const std::string& subexpression() const noexcept { return subexpr_; }

private:
    std::string subexpr_;
};

/// Base for failures of the numerical substrate (quadrature, integration, inversion).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double a, double b)
        : NumericalError(what + " on [" + std::to_string(a) + ", " + std::to_string(b) + "]"),
          a_(a), b_(b) {}
    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }

private:
    double a_, b_;
};

class OverflowError : public NumericalError {
public:
    OverflowError(const std::string& what, std::ptrdiff_t last_valid)
        : NumericalError(what + " (last valid index " + std::to_string(last_valid) + ")"),
          last_valid_(last_valid) {}
    std::ptrdiff_t last_valid_index() const noexcept { return last_valid_; }

private:
    std::ptrdiff_t last_valid_;
};

/// The equation is singular on the requested domain (A(x) = 0, B/A has a pole, ...).
class SingularityError : public NumericalError {
public:
    SingularityError(const std::string& what, double where)
        : NumericalError(what + " at x = " + std::to_string(where)), where_(where) {}
    double where() const noexcept { return where_; }

private:
    double where_;
};

}  // namespace darboux

#endif  // DARBOUX_ERRORS_HPP
