#pragma once

#include <stdexcept>
#include <string>

namespace vexp {

// Invalid argument values (z <= 0, alpha out of range, bad model parameters...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Root bracketing / convergence failures.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature failed to reach the requested tolerance.
class quadrature_error : public std::runtime_error {
public:
    explicit quadrature_error(const std::string& what) : std::runtime_error(what) {}
};

// A method's applicability condition is violated (e.g. epsilon
// indistinguishable from zero), so the requested quantity is undefined.
class inapplicable_error : public std::runtime_error {
public:
    explicit inapplicable_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace vexp
