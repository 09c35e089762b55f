#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace featprog {

/// Root of every exception thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs of mismatched or ragged shape.
class shape_error : public error {
public:
    using error::error;
};

/// Non-increasing time index.
class index_error : public error {
public:
    using error::error;
};

/// Out-of-domain operator or model parameter.
class parameter_error : public error {
public:
    using error::error;
};

/// An operation would produce no usable samples.
class empty_output_error : public error {
public:
    using error::error;
};

/// Not enough complete rows to fit or score a model.
class insufficient_data_error : public error {
public:
    using error::error;
};

/// Metric undefined for the given inputs (e.g. constant actuals).
class undefined_metric_error : public error {
public:
    using error::error;
};

/// Normal equations could not be solved.
class solver_error : public error {
public:
    using error::error;
};

/// Basic and extended evaluations were not run on the same rows.
class protocol_error : public error {
public:
    using error::error;
};

/// Enumeration would exceed its configured size bound.
class capacity_error : public error {
public:
    using error::error;
};

/// Malformed input data (CSV, parameter files).
class data_error : public error {
public:
    using error::error;
};

/// Feature program rejected by the parser or the validator.
///
/// `line` and `column` are 1-based; zero means the position is not known
/// (structural errors that are not tied to a character).
class program_error : public error {
public:
    program_error(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : error(line == 0 ? what
                          : what + " (line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Expression text that does not match the grammar. `offset` is a 0-based byte
/// offset into the expression string.
class syntax_error : public program_error {
public:
    syntax_error(const std::string& what, std::size_t offset)
        : program_error(what + " at offset " + std::to_string(offset)), reason_(what), offset_(offset) {}
    syntax_error(const std::string& what, std::size_t offset, std::size_t line, std::size_t column)
        : program_error(what + " at offset " + std::to_string(offset), line, column),
          reason_(what),
          offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    /// The message without position information.
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
    std::size_t offset_;
};

}  // namespace featprog
