#pragma once

#include <cstdint>

#include "cbc/cfg/method_cfg.hpp"
#include "cbc/runtime/test_case.hpp"
#include "cbc/runtime/trace.hpp"

namespace cbc {

inline constexpr std::int64_t kDefaultBudget = 10000;
inline constexpr int kMaxCallDepth = 200;

struct BranchDistance {
  std::int64_t dist_true = 0;
  std::int64_t dist_false = 0;
  bool operator==(const BranchDistance&) const = default;
};

/// Korel distances (K = 1) of an integer comparison `a op b`. Saturates at
/// INT64_MAX instead of overflowing.
BranchDistance branch_distance(BinOp op, std::int64_t a, std::int64_t b);
BranchDistance bool_distance(bool value);

/// Runs a test against the program. Runtime faults and budget exhaustion end
/// the run and are recorded as the last outcome; `budget` bounds the number
/// of executed instructions, calls and branch decisions.
Trace execute_test(const CompiledProgram& prog, const TestCase& test, std::int64_t budget = kDefaultBudget);

}  // namespace cbc
