#pragma once

#include <stdexcept>
#include <string>

namespace mockcheck {

// Input that violates a documented precondition (bad JSON, malformed CSV,
// inconsistent shapes).  Callers turn these into usage errors.
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed external input (CSV/JSON) with position info where available.
class ParseError : public ContractError {
 public:
  explicit ParseError(const std::string& what) : ContractError(what) {}
};

}  // namespace mockcheck
