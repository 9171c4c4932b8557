#pragma once

#include <stdexcept>
#include <string>

namespace maze {

// Error taxonomy shared by the library and the CLI exit-code mapping.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Problem size exceeds a solver's documented capacity.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file or byte stream.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Caller broke an API contract (shape mismatch, incompatible weights).
struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// Section planning cannot satisfy the requested split.
struct PlanError : std::runtime_error {
  explicit PlanError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maze
