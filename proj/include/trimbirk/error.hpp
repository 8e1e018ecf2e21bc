#pragma once

#include <stdexcept>
#include <string>

namespace trimbirk {

/// Root of the library's exception hierarchy. Every error carries a kind so
/// the CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
public:
    enum class Kind { domain, length, validation, range, budget, construction, precondition, io };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Value outside the mathematical domain of an operation (rational where an
// irrational is required, log of a non-positive number, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(Kind::domain, w) {}
};

// A stream or table is too short for the requested level.
struct LengthError : Error {
    explicit LengthError(const std::string& w) : Error(Kind::length, w) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error(Kind::validation, w) {}
};

// Orbit index or N beyond the certified range of a rotation context.
struct RangeError : Error {
    explicit RangeError(const std::string& w) : Error(Kind::range, w) {}
};

struct BudgetError : Error {
    explicit BudgetError(const std::string& w) : Error(Kind::budget, w) {}
};

struct ConstructionError : Error {
    explicit ConstructionError(const std::string& w) : Error(Kind::construction, w) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error(Kind::precondition, w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(Kind::io, w) {}
};

}  // namespace trimbirk
