#pragma once

#include <stdexcept>
#include <string>

namespace pumpq {

/// Coarse failure categories; the CLI maps these onto process exit codes.
enum class ErrorKind {
    InvalidInput,  ///< malformed or out-of-contract data (exit 2)
    NotRobust,     ///< loop touches a degenerate stratum (exit 3)
    Numerical,     ///< overflow, step failure, near-singular solve (exit 4)
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

struct DisconnectedError : Error {
    explicit DisconnectedError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

struct IndexOutOfRangeError : Error {
    explicit IndexOutOfRangeError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

struct DimensionMismatchError : Error {
    explicit DimensionMismatchError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

struct NotConservedError : Error {
    explicit NotConservedError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

struct NotZeroSumError : Error {
    explicit NotZeroSumError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

struct CountLimitError : Error {
    explicit CountLimitError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

struct AmbiguousGroupingError : Error {
    explicit AmbiguousGroupingError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct OverflowError : Error {
    explicit OverflowError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct StepFailureError : Error {
    explicit StepFailureError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct NearSingularMonodromyError : Error {
    explicit NearSingularMonodromyError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct NotRobustError : Error {
    explicit NotRobustError(const std::string& w) : Error(ErrorKind::NotRobust, w) {}
};

struct RefinementLimitError : Error {
    explicit RefinementLimitError(const std::string& w) : Error(ErrorKind::NotRobust, w) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

struct ArityMismatchError : Error {
    explicit ArityMismatchError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

}  // namespace pumpq
