#pragma once

#include <stdexcept>
#include <string>

namespace aiid {

// Raised when an input exceeds a documented size/enumeration guard.
class GuardError : public std::runtime_error {
public:
  explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a conic/transport solve does not reach a usable optimum.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace aiid
