#ifndef WEAKNET_ERRORS_HPP
#define WEAKNET_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace weaknet {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- matrix validation -----------------------------------------------------

class NonSquareError : public Error {
public:
    NonSquareError(std::int64_t rows, std::int64_t cols)
        : Error("matrix is not square: " + std::to_string(rows) + "x" + std::to_string(cols)),
          rows(rows), cols(cols) {}
    std::int64_t rows, cols;
};

class NegativeEntryError : public Error {
public:
    NegativeEntryError(std::int64_t row, std::int64_t col, double value)
        : Error("negative weight at (" + std::to_string(row + 1) + "," + std::to_string(col + 1) +
                "): " + std::to_string(value)),
          row(row), col(col), value(value) {}
    std::int64_t row, col;   // 0-based
    double value;
};

class ColumnSumError : public Error {
public:
    ColumnSumError(std::int64_t col, double sum)
        : Error("column " + std::to_string(col + 1) + " sums to " + std::to_string(sum) +
                ", expected 1"),
          col(col), sum(sum) {}
    std::int64_t col;        // 0-based
    double sum;
};

// ---- classification --------------------------------------------------------

class NotWeaklyStructuredError : public Error {
public:
    explicit NotWeaklyStructuredError(const std::string& detail)
        : Error("network is not weakly structured: " + detail) {}
};

class NoSendingSubnetworkError : public Error {
public:
    NoSendingSubnetworkError() : Error("network has no sending sub-network") {}
};

// ---- spectral computation --------------------------------------------------

class NoConvergenceError : public Error {
public:
    explicit NoConvergenceError(std::int64_t max_iters)
        : Error("iteration did not converge within " + std::to_string(max_iters) + " steps"),
          max_iters(max_iters) {}
    std::int64_t max_iters;
};

class NotIrreducibleError : public Error {
public:
    NotIrreducibleError() : Error("matrix block is not irreducible") {}
};

class SingularSystemError : public Error {
public:
    explicit SingularSystemError(double radius)
        : Error("receiving-block spectral radius " + std::to_string(radius) +
                " too close to 1; system is singular"),
          radius(radius) {}
    double radius;
};

// ---- belief updates and diagnostics ----------------------------------------

class ZeroEvidenceError : public Error {
public:
    ZeroEvidenceError(std::int64_t agent, std::int64_t time)
        : Error("observed signal has zero probability under every believed state (agent " +
                std::to_string(agent + 1) + ", time " + std::to_string(time) + ")"),
          agent(agent), time(time) {}
    std::int64_t agent;      // 0-based; -1 when unknown
    std::int64_t time;       // -1 when outside a simulation
};

class UndefinedRegretError : public Error {
public:
    UndefinedRegretError() : Error("regret undefined: belief places zero mass on the target set") {}
};

class UndefinedKLError : public Error {
public:
    UndefinedKLError() : Error("KL divergence undefined: forecast is zero on the support") {}
};

class WindowError : public Error {
public:
    WindowError(std::int64_t window, std::int64_t recorded)
        : Error("window of " + std::to_string(window) + " samples exceeds the " +
                std::to_string(recorded) + " recorded steps"),
          window(window), recorded(recorded) {}
    std::int64_t window, recorded;
};

// ---- scenario I/O ----------------------------------------------------------

class ParseError : public Error {
public:
    ParseError(std::int64_t line, const std::string& message)
        : Error("parse error at line " + std::to_string(line) + ": " + message), line(line) {}
    std::int64_t line;
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& component, const std::string& detail)
        : Error("invalid scenario [" + component + "]: " + detail), component(component) {}
    std::string component;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& path)
        : Error("cannot open file: " + path), path(path) {}
    std::string path;
};

} // namespace weaknet

#endif // WEAKNET_ERRORS_HPP
