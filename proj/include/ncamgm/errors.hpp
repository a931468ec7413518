#pragma once

#include <stdexcept>
#include <string>

namespace ncamgm {

// Bad arguments or malformed external input (files, flags, dimensions).
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A documented operation precondition does not hold for the given values.
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative numerical routine failed; carries the residual it got stuck at.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace ncamgm
