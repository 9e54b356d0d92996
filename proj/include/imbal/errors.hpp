#pragma once

#include <stdexcept>
#include <string>

namespace imbal {

// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory { Validation, Infeasible, Internal };

class Error : public std::runtime_error {
public:
    Error(std::string code, ErrorCategory category, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)), category_(category) {}

    const std::string& code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_; }

private:
    std::string code_;
    ErrorCategory category_;
};

/// Requested balancing volume is larger than what the ladders can deliver.
/// `minute` is -1 when raised outside a quarter simulation.
class VolumeExceedsLadder : public Error {
public:
    VolumeExceedsLadder(int minute, std::string ladder, double requested, double available);

    int minute() const noexcept { return minute_; }
    const std::string& ladder() const noexcept { return ladder_; }
    double requested() const noexcept { return requested_; }
    double available() const noexcept { return available_; }

    VolumeExceedsLadder at_minute(int minute) const {
        return VolumeExceedsLadder(minute, ladder_, requested_, available_);
    }

private:
    int minute_;
    std::string ladder_;
    double requested_;
    double available_;
};

class NoActivation : public Error {
public:
    explicit NoActivation(const std::string& what)
        : Error("NoActivation", ErrorCategory::Infeasible, what) {}
};

class EmptyLadder : public Error {
public:
    explicit EmptyLadder(const std::string& what)
        : Error("EmptyLadder", ErrorCategory::Validation, what) {}
};

class MissingMarginal : public Error {
public:
    explicit MissingMarginal(const std::string& what)
        : Error("MissingMarginal", ErrorCategory::Infeasible, what) {}
};

class PowerInfeasible : public Error {
public:
    explicit PowerInfeasible(const std::string& what)
        : Error("PowerInfeasible", ErrorCategory::Infeasible, what) {}
};

class EnumerationTooLarge : public Error {
public:
    explicit EnumerationTooLarge(const std::string& what)
        : Error("EnumerationTooLarge", ErrorCategory::Infeasible, what) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& reason);

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string invariant, const std::string& detail);

    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

}  // namespace imbal
