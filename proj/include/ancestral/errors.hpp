#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ancestral {

/// Invalid model or parameter values supplied by the caller.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition on an argument was broken.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Index or size outside the admissible range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Arguments are individually valid but jointly outside the domain
/// of the operation (e.g. eta is not a coarsening of xi).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The requested enumeration is too large to run.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Statistical procedure could not produce a meaningful result.
class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling kept no replicate.
class ZeroSupportError : public std::runtime_error {
public:
    explicit ZeroSupportError(std::uint64_t raw_reps)
        : std::runtime_error("conditioning event never occurred in " +
                             std::to_string(raw_reps) + " replicates"),
          raw_reps_(raw_reps) {}

    std::uint64_t raw_reps() const noexcept { return raw_reps_; }

private:
    std::uint64_t raw_reps_;
};

}  // namespace ancestral
