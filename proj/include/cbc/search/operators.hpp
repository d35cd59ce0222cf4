#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbc/flow/coupling.hpp"
#include "cbc/runtime/test_case.hpp"
#include "cbc/search/config.hpp"

namespace cbc {

struct RepairStats {
  std::int64_t crossover_children = 0;
  std::int64_t crossover_replaced = 0;  // broken children swapped for a parent
  std::int64_t mutations = 0;
  std::int64_t repairs_started = 0;
  std::int64_t repair_attempts = 0;
  std::int64_t repairs_succeeded = 0;
  std::int64_t repairs_abandoned = 0;
};

/// Builds and varies chromosomes for one analyzed pair. Invoked methods are
/// the non-private, non-abstract methods visible on the test class; the
/// analysis' covering methods are the preferred ones.
class TestFactory {
 public:
  TestFactory(const CompiledProgram& prog, const PairAnalysis& pair, SearchConfig config);

  const std::vector<std::string>& covering() const { return covering_; }
  const std::vector<const MethodDef*>& covering_methods() const { return cover_defs_; }
  const std::vector<const MethodDef*>& other_methods() const { return other_defs_; }

  /// Whether some statement constructs the test class through a covering
  /// ctor or invokes a covering method.
  bool has_covering_call(const TestCase& t) const;

  TestCase random_test(Rng& rng) const;

  /// Inserts one invoke on a test-class object at a random position. It
  /// targets a covering method with the configured bias. Returns whether
  /// the chosen method was a covering one.
  bool insert_call(TestCase& t, Rng& rng) const;

  std::pair<TestCase, TestCase> crossover(const TestCase& p1, const TestCase& p2, Rng& rng,
                                          RepairStats* stats = nullptr) const;

  /// Empty when the repair loop gives up.
  std::optional<TestCase> mutate(const TestCase& t, Rng& rng, RepairStats* stats = nullptr) const;

  /// Removes statement `i`; later references are re-bound to the nearest
  /// earlier compatible value or their statements dropped.
  TestCase remove_statement(const TestCase& t, int i) const;

  const SearchConfig& config() const { return config_; }

 private:
  struct Piece;
  TestCase rebuild(const std::vector<Piece>& pieces) const;
  Arg random_arg(TestCase& t, int& pos, const Type& want, Rng& rng, int depth) const;
  void place_call(TestCase& t, const MethodDef* m, Rng& rng) const;
  int ensure_object(TestCase& t, int& pos, const std::string& cls, Rng& rng, int depth) const;
  std::vector<Arg> random_args(TestCase& t, int& pos, const std::vector<Param>& params, Rng& rng,
                               int depth) const;
  std::int64_t random_int(Rng& rng) const;
  bool mutate_statement(TestCase& t, int i, Rng& rng) const;
  bool is_covering(const TestCase& t, int i) const;

  const CompiledProgram* prog_;
  const Program* program_;
  SearchConfig config_;
  std::string test_class_;
  std::vector<std::string> covering_;
  bool ctor_covers_ = false;
  std::vector<const MethodDef*> cover_defs_;
  std::vector<const MethodDef*> other_defs_;
};

}  // namespace cbc
