#pragma once

#include <stdexcept>
#include <string>

namespace lipkin {

// Precondition violations (bad N, mismatched sizes, out-of-domain parameters)
// surface as std::invalid_argument / std::domain_error. Iterative solvers that
// run out of budget throw ConvergenceError so callers can perturb and retry.
class ConvergenceError : public std::runtime_error {
public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lipkin
