#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbc/flow/coupling.hpp"
#include "cbc/runtime/test_case.hpp"
#include "cbc/runtime/trace.hpp"
#include "cbc/search/config.hpp"
#include "cbc/search/operators.hpp"

namespace cbc {

/// Best test per couple; a couple is covered once its best value is 0.
class Archive {
 public:
  struct Entry {
    TestCase test;
    double value = 0;
  };

  explicit Archive(std::size_t couples) : couples_(couples) {}

  /// Offers a test with its objective vector. A covering test replaces the
  /// stored one only when it is shorter.
  void offer(const TestCase& t, const std::vector<double>& values);

  bool covered(int couple) const { return covered_.count(couple) > 0; }
  const std::set<int>& covered_set() const { return covered_; }
  std::size_t size() const { return couples_; }
  const std::map<int, Entry>& best() const { return best_; }

 private:
  std::size_t couples_;
  std::map<int, Entry> best_;
  std::set<int> covered_;
};

struct SuiteEntry {
  TestCase test;
  std::vector<int> covers;  // couple ids
};

struct TestSuite {
  std::string caller;
  std::string callee;
  std::string test_class;
  std::vector<SuiteEntry> tests;
};

nlohmann::json to_json(const Program& program, const TestSuite& s);
TestSuite suite_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TestCase& t);
TestCase test_from_json(const nlohmann::json& j);

enum class SearchStatus { Ok, NoCoupledBranches, NoCoveringMethods };
const char* to_string(SearchStatus s);

struct GenerationStats {
  int generation = 0;
  std::size_t covered = 0;
  std::int64_t evaluations = 0;
  std::size_t archive_size = 0;
};

struct SearchReport {
  SearchStatus status = SearchStatus::Ok;
  std::size_t couples = 0;
  std::vector<GenerationStats> history;
  std::int64_t evaluations = 0;
  double seconds = 0;
  std::optional<double> cbc;  // recomputed from the suite's traces
  RepairStats repair;
  std::int64_t invariant_violations = 0;  // population members without a covering call
};

nlohmann::json to_json(const SearchReport& r);

/// Ranks of the rows of `values` (one row per test). Rank 0 holds, for
/// every objective in `open`, the test with the least value (ties: shorter,
/// then earlier). The others are ranked by non-dominated sorting on `open`.
std::vector<int> preference_ranks(const std::vector<std::vector<double>>& values, const std::vector<int>& open,
                                  const std::vector<std::size_t>& lengths);

/// Crowding distance of a front over the objectives in `open`.
std::vector<double> crowding_distance(const std::vector<std::vector<double>>& values,
                                      const std::vector<int>& front, const std::vector<int>& open);

/// Called after each generation with the population; used by tests and
/// logging.
using GenerationHook = std::function<void(int generation, const std::vector<TestCase>& population)>;

std::pair<TestSuite, SearchReport> mosa_generate(const CompiledProgram& prog, const PairAnalysis& pair,
                                                 const SearchConfig& config, const GenerationHook& hook = {});

}  // namespace cbc
