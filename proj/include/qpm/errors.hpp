#pragma once

#include <stdexcept>
#include <string>

namespace qpm {

// Bad arguments or malformed mathematical input (non-unitary basis, ragged
// grid, invalid group spec...). CLI maps this to the usage exit code.
struct invalid_input : std::runtime_error {
  explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// Guardrails: a request whose exact answer would exceed the memory/size
// budget (transfer matrix too large, factorial enumeration too deep...).
struct resource_limit : std::runtime_error {
  explicit resource_limit(const std::string& what) : std::runtime_error(what) {}
};

// A stochastic procedure exhausted its retry budget without converging.
struct sampling_failure : std::runtime_error {
  explicit sampling_failure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpm
