#pragma once

#include <stdexcept>
#include <string>

namespace dimscope {

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Regression could not be carried out (constant or non-positive responses).
class DegenerateFit : public std::runtime_error {
public:
    DegenerateFit(const std::string& what, std::string diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

/// A statistic falls outside everything a calibration table can explain.
class OutOfRange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, int steps)
        : std::runtime_error(what), residual_(residual), steps_(steps) {}
    double residual() const noexcept { return residual_; }
    int steps() const noexcept { return steps_; }

private:
    double residual_;
    int steps_;
};

/// Malformed input file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dimscope
