#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace percept {

/// Base of every error the harness raises. `kind()` is the stable,
/// machine-readable tag the CLI puts into its structured error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define PERCEPT_DEFINE_ERROR(Name, tag)                                     \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message) : Error(tag, message) {} \
    };

PERCEPT_DEFINE_ERROR(RangeError, "range_violation")
PERCEPT_DEFINE_ERROR(CapacityError, "capacity")
PERCEPT_DEFINE_ERROR(IntegrityError, "integrity")
PERCEPT_DEFINE_ERROR(PairingError, "pairing")
PERCEPT_DEFINE_ERROR(EmptyInputError, "empty_input")
PERCEPT_DEFINE_ERROR(InsufficientRunsError, "insufficient_runs")
PERCEPT_DEFINE_ERROR(MixedDatasetError, "mixed_dataset")
PERCEPT_DEFINE_ERROR(DegenerateVarianceError, "degenerate_variance")
PERCEPT_DEFINE_ERROR(AccuracyError, "accuracy")
PERCEPT_DEFINE_ERROR(ShapeError, "shape_mismatch")
PERCEPT_DEFINE_ERROR(DivergenceError, "divergence")
PERCEPT_DEFINE_ERROR(IoError, "io")
PERCEPT_DEFINE_ERROR(FormatError, "format")
PERCEPT_DEFINE_ERROR(ConfigError, "config")
PERCEPT_DEFINE_ERROR(ReferenceError, "reference")

#undef PERCEPT_DEFINE_ERROR

/// Raised by readers when a file holds fewer/more records than its header
/// or manifest promises.
class LengthMismatchError : public Error {
public:
    LengthMismatchError(const std::string& what, std::size_t expected, std::size_t actual)
        : Error("length_mismatch",
                what + ": expected " + std::to_string(expected) + " records, found " +
                    std::to_string(actual)),
          expected_(expected),
          actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

}  // namespace percept
