#pragma once

#include <stdexcept>
#include <string>

namespace permspec {

// Invalid argument values (out-of-range parameters, inconsistent inputs).
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Request outside what the implementation supports (complexity guards,
// unsupported descriptor combinations).
class capability_error : public std::runtime_error {
public:
    explicit capability_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical method failed to reach its accuracy or stability contract.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace permspec
