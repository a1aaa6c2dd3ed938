#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexind {

// Base of every data/numerical failure raised by the library. The CLI maps
// these to exit code 1; usage errors are raised separately as UsageError.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

// A malformed data row. `line` is 1-based and counts the header line.
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class UndefinedCorrelationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateLabelsError : public Error {
public:
    using Error::Error;
};

class TrainingError : public NumericalError {
public:
    TrainingError(int epoch, const std::string& what)
        : NumericalError("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace lexind
