#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbc/cfg/method_cfg.hpp"
#include "cbc/runtime/interpreter.hpp"
#include "cbc/search/mosa.hpp"

namespace cbc {

/// Operator names accepted by generate_mutants, in reporting order.
const std::vector<std::string>& mutation_operators();

/// "RetStaRep", "FunCalDel" or "Standard".
std::string operator_family(const std::string& op);

struct Mutant {
  int id = 0;
  std::string op;
  std::string method;  // method key
  int line = 0;        // class-relative
  std::string label;   // node of the original method's CFG holding the site
  std::string description;
  std::shared_ptr<const CompiledProgram> program;
};

/// One mutant per applicable (operator, site) in the methods and ctor that
/// `target_class` declares. Empty `operators` selects all of them. Sites
/// whose mutated method no longer has a valid CFG are skipped.
std::vector<Mutant> generate_mutants(const CompiledProgram& prog, const std::string& target_class,
                                     const std::set<std::string>& operators = {});

enum class MutantStatus { Killed, Survived, NotCovered };
const char* to_string(MutantStatus s);

struct MutantResult {
  int id = 0;
  std::string op;
  std::string family;
  std::string method;
  int line = 0;
  std::string label;
  std::string description;
  MutantStatus status = MutantStatus::NotCovered;
  int killing_test = -1;  // first suite test whose outcomes differ
  bool covered = false;
};

struct Tally {
  int total = 0;
  int killed = 0;
  int survived = 0;
  int not_covered = 0;
};

struct MutationReport {
  std::vector<MutantResult> mutants;
  Tally overall;
  std::map<std::string, Tally> by_operator;
  std::map<std::string, Tally> by_family;
  /// Killed mutants whose site no original trace visited. Always zero when
  /// sites are located correctly.
  int killed_uncovered = 0;

  double score() const { return overall.total ? static_cast<double>(overall.killed) / overall.total : 0.0; }
};

/// Observable behaviour of a run: outcome kinds, values and error kinds.
/// Error locations are left out.
std::vector<Outcome> observable(const Trace& t);

/// Differential strong kill: a mutant is killed when some test's observable
/// behaviour differs from the original run. Tests whose original run hit
/// the budget cannot kill.
MutationReport run_mutation_analysis(const CompiledProgram& prog, const std::vector<Mutant>& mutants,
                                     const std::vector<TestCase>& suite, std::int64_t budget = kDefaultBudget);

nlohmann::json to_json(const MutationReport& r);

}  // namespace cbc
