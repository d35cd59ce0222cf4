#include <algorithm>
#include <chrono>
#include <numeric>

#include "cbc/errors.hpp"
#include "cbc/flow/cbc_score.hpp"
#include "cbc/runtime/interpreter.hpp"
#include "cbc/runtime/objective.hpp"
#include "cbc/search/mosa.hpp"

namespace cbc {

namespace {

struct Member {
  TestCase test;
  std::vector<double> values;
  int rank = 0;
  double crowding = 0;
};

class Search {
 public:
  Search(const CompiledProgram& prog, const PairAnalysis& pair, const SearchConfig& config,
         const TestFactory& factory)
      : prog_(prog), pair_(pair), config_(config), factory_(factory), eval_(pair), archive_(pair.couples.size()),
        rng_(config.seed), start_(std::chrono::steady_clock::now()) {}

  void run(SearchReport& report, const GenerationHook& hook) {
    std::vector<Member> pop;
    for (int i = 0; i < config_.population; ++i) pop.push_back(evaluate(factory_.random_test(rng_)));
    select(pop, config_.population);
    record(0, pop, report, hook);
    for (int gen = 1; !done(); ++gen) {
      std::vector<Member> offspring = breed(pop, report);
      for (auto& m : offspring) pop.push_back(std::move(m));
      select(pop, config_.population);
      record(gen, pop, report, hook);
    }
    report.evaluations = evaluations_;
  }

  const Archive& archive() const { return archive_; }

 private:
  Member evaluate(TestCase t) {
    ++evaluations_;
    Trace tr = execute_test(prog_, t);
    Member m{std::move(t), eval_.values(tr)};
    archive_.offer(m.test, m.values);
    return m;
  }

  bool out_of_time() const {
    if (config_.max_seconds <= 0) return false;
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    return dt.count() >= config_.max_seconds;
  }

  bool done() const {
    return evaluations_ >= config_.max_evaluations || archive_.covered_set().size() == archive_.size() ||
           out_of_time();
  }

  std::vector<int> open() const {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(archive_.size()); ++c) {
      if (!archive_.covered(c)) out.push_back(c);
    }
    return out;
  }

  // Binary tournament on (rank, crowding, position).
  const Member& tournament(const std::vector<Member>& pop) {
    std::size_t a = rng_.index(pop.size());
    std::size_t b = rng_.index(pop.size());
    if (a > b) std::swap(a, b);
    const Member& x = pop[a];
    const Member& y = pop[b];
    if (y.rank != x.rank) return y.rank < x.rank ? y : x;
    return y.crowding > x.crowding ? y : x;
  }

  std::vector<Member> breed(const std::vector<Member>& pop, SearchReport& report) {
    std::vector<Member> out;
    // Bounded so a run of abandoned repairs cannot spin forever.
    for (int tries = 0; out.size() < pop.size() && tries < 10 * config_.population; ++tries) {
      const Member& p1 = tournament(pop);
      const Member& p2 = tournament(pop);
      TestCase c1 = p1.test;
      TestCase c2 = p2.test;
      if (rng_.chance(config_.crossover_rate)) std::tie(c1, c2) = factory_.crossover(p1.test, p2.test, rng_, &report.repair);
      for (TestCase* c : {&c1, &c2}) {
        if (done() || out.size() >= pop.size()) break;
        if (auto m = factory_.mutate(*c, rng_, &report.repair)) out.push_back(evaluate(std::move(*m)));
      }
      if (done()) break;
    }
    return out;
  }

  // Keeps `size` members: preference front first, then non-dominated fronts,
  // the last admitted front cut by crowding distance.
  void select(std::vector<Member>& pop, int size) {
    std::vector<std::vector<double>> values;
    std::vector<std::size_t> lengths;
    for (const auto& m : pop) {
      values.push_back(m.values);
      lengths.push_back(m.test.stmts.size());
    }
    std::vector<int> objectives = open();
    std::vector<int> rank = preference_ranks(values, objectives, lengths);
    int top = pop.empty() ? 0 : *std::max_element(rank.begin(), rank.end());
    std::vector<Member> next;
    for (int r = 0; r <= top && static_cast<int>(next.size()) < size; ++r) {
      std::vector<int> front;
      for (int i = 0; i < static_cast<int>(pop.size()); ++i) {
        if (rank[i] == r) front.push_back(i);
      }
      std::vector<double> crowd = crowding_distance(values, front, objectives);
      std::vector<std::size_t> order(front.size());
      std::iota(order.begin(), order.end(), 0);
      if (static_cast<int>(next.size() + front.size()) > size) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
      }
      for (std::size_t k : order) {
        if (static_cast<int>(next.size()) >= size) break;
        Member m = std::move(pop[front[k]]);
        m.rank = r;
        m.crowding = crowd[k];
        next.push_back(std::move(m));
      }
    }
    pop = std::move(next);
  }

  void record(int gen, const std::vector<Member>& pop, SearchReport& report, const GenerationHook& hook) {
    std::vector<TestCase> tests;
    for (const auto& m : pop) {
      if (!factory_.has_covering_call(m.test)) ++report.invariant_violations;
      tests.push_back(m.test);
    }
    report.history.push_back({gen, archive_.covered_set().size(), evaluations_, archive_.covered_set().size()});
    if (hook) hook(gen, tests);
  }

  const CompiledProgram& prog_;
  const PairAnalysis& pair_;
  const SearchConfig& config_;
  const TestFactory& factory_;
  ObjectiveEvaluator eval_;
  Archive archive_;
  Rng rng_;
  std::chrono::steady_clock::time_point start_;
  std::int64_t evaluations_ = 0;
};

}  // namespace

std::pair<TestSuite, SearchReport> mosa_generate(const CompiledProgram& prog, const PairAnalysis& pair,
                                                 const SearchConfig& config, const GenerationHook& hook) {
  auto t0 = std::chrono::steady_clock::now();
  TestSuite suite{pair.caller, pair.callee, pair.test_class, {}};
  SearchReport report;
  report.couples = pair.couples.size();
  if (pair.couples.empty()) {
    report.status = SearchStatus::NoCoupledBranches;
    return {suite, report};
  }
  if (pair.covering.empty()) {
    report.status = SearchStatus::NoCoveringMethods;
    return {suite, report};
  }
  if (auto err = validate_config(config)) throw Error("invalid search config: " + *err);
  std::optional<TestFactory> factory;
  try {
    factory.emplace(prog, pair, config);
  } catch (const Error&) {
    report.status = SearchStatus::NoCoveringMethods;
    return {suite, report};
  }

  Search search(prog, pair, config, *factory);
  search.run(report, hook);

  // Archive tests, deduplicated, in order of the first couple they hold.
  for (const auto& [c, entry] : search.archive().best()) {
    if (!search.archive().covered(c)) continue;
    auto same = [&](const SuiteEntry& e) { return e.test == entry.test; };
    if (std::none_of(suite.tests.begin(), suite.tests.end(), same)) suite.tests.push_back({entry.test, {}});
  }
  std::vector<Trace> traces;
  for (auto& e : suite.tests) {
    traces.push_back(execute_test(prog, e.test));
    for (const auto& c : pair.couples) {
      if (couple_covered(pair, c, traces.back(), CbcMatching::Scoped)) e.covers.push_back(c.id);
    }
  }
  report.cbc = cbc_score(pair, traces, CbcMatching::Scoped);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {suite, report};
}

}  // namespace cbc
