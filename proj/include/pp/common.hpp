#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pp {

// Thrown when an operation would exceed its enumeration / sampling budget.
// The CLI maps this to its own exit code, distinct from validation errors.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Execution policy for the data-parallel kernels.  Every parallel kernel has
// a serial twin that produces bit-identical results; tests compare the two
// and the benchmark target times them.
enum class Exec { serial, parallel };

inline constexpr std::int64_t kDefaultBudget = 100'000'000;

}  // namespace pp
