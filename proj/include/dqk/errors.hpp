#pragma once

#include <stdexcept>
#include <string>

namespace dqk {

/// Invalid scenario or command-line configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure tagged with the module that raised it.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module))
    {
    }
    const std::string& module() const { return module_; }

private:
    std::string module_;
};

}  // namespace dqk
