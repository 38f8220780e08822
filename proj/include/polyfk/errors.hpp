#pragma once

#include <stdexcept>
#include <string>

namespace polyfk {

// Error categories map to CLI exit codes: parse=2, topology=3, solver=4.

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}
};

struct TopologyError : std::runtime_error {
  explicit TopologyError(const std::string &msg) : std::runtime_error(msg) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string &msg) : std::runtime_error(msg) {}
};

struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string &msg) : std::logic_error(msg) {}
};

} // namespace polyfk
