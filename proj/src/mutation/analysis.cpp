#include "cbc/mutation/mutation.hpp"

namespace cbc {

const char* to_string(MutantStatus s) {
  switch (s) {
    case MutantStatus::Killed: return "killed";
    case MutantStatus::Survived: return "survived";
    case MutantStatus::NotCovered: return "not-covered";
  }
  return "?";
}

std::vector<Outcome> observable(const Trace& t) {
  std::vector<Outcome> out = t.outcomes;
  for (auto& o : out) o.location.clear();
  return out;
}

namespace {

void count(Tally& t, MutantStatus s) {
  ++t.total;
  switch (s) {
    case MutantStatus::Killed: ++t.killed; break;
    case MutantStatus::Survived: ++t.survived; break;
    case MutantStatus::NotCovered: ++t.not_covered; break;
  }
}

nlohmann::json tally_json(const Tally& t) {
  return {{"total", t.total}, {"killed", t.killed}, {"survived", t.survived}, {"not_covered", t.not_covered}};
}

}  // namespace

MutationReport run_mutation_analysis(const CompiledProgram& prog, const std::vector<Mutant>& mutants,
                                     const std::vector<TestCase>& suite, std::int64_t budget) {
  std::vector<Trace> base;
  base.reserve(suite.size());
  for (const auto& t : suite) base.push_back(execute_test(prog, t, budget));

  MutationReport r;
  for (const auto& op : mutation_operators()) r.by_operator[op];
  for (const Mutant& m : mutants) {
    MutantResult res{m.id, m.op, operator_family(m.op), m.method, m.line, m.label, m.description};
    for (const auto& tr : base) res.covered |= tr.visited.count({m.method, m.line}) > 0;
    for (std::size_t i = 0; i < suite.size() && res.killing_test < 0; ++i) {
      if (base[i].budget_exhausted) continue;
      Trace mt = execute_test(*m.program, suite[i], budget);
      if (observable(mt) != observable(base[i])) res.killing_test = static_cast<int>(i);
    }
    if (res.killing_test >= 0) {
      res.status = MutantStatus::Killed;
      if (!res.covered) ++r.killed_uncovered;
    } else {
      res.status = res.covered ? MutantStatus::Survived : MutantStatus::NotCovered;
    }
    count(r.overall, res.status);
    count(r.by_operator[res.op], res.status);
    count(r.by_family[res.family], res.status);
    r.mutants.push_back(std::move(res));
  }
  return r;
}

nlohmann::json to_json(const MutationReport& r) {
  nlohmann::json mutants = nlohmann::json::array();
  for (const auto& m : r.mutants) {
    mutants.push_back({{"id", m.id},
                       {"operator", m.op},
                       {"family", m.family},
                       {"method", m.method},
                       {"line", m.line},
                       {"label", m.label},
                       {"description", m.description},
                       {"status", to_string(m.status)},
                       {"covered", m.covered},
                       {"killing_test", m.killing_test}});
  }
  // Rows per family, operators nested under their family.
  nlohmann::json families = nlohmann::json::object();
  for (const auto& [fam, t] : r.by_family) {
    nlohmann::json ops = nlohmann::json::object();
    for (const auto& [op, ot] : r.by_operator) {
      if (operator_family(op) == fam && ot.total) ops[op] = tally_json(ot);
    }
    families[fam] = tally_json(t);
    families[fam]["operators"] = ops;
  }
  return {{"score", r.score()},
          {"overall", tally_json(r.overall)},
          {"families", families},
          {"killed_uncovered", r.killed_uncovered},
          {"mutants", mutants}};
}

}  // namespace cbc
