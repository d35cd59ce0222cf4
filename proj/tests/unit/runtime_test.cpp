#include <gtest/gtest.h>

#include <limits>

#include "cbc/flow/cbc_score.hpp"
#include "cbc/lang/parser.hpp"
#include "cbc/runtime/interpreter.hpp"
#include "cbc/runtime/objective.hpp"
#include "test_util.hpp"

using namespace cbc;
using cbc::testing::read_fixture;

namespace {

CompiledProgram compile(const std::string& src) { return CompiledProgram(parse_program(src)); }

const CompiledProgram& person_car() {
  static const CompiledProgram prog = compile(read_fixture("person_car.moo"));
  return prog;
}

// Car(fuel); Person(car); [setLazy(lazy)]; person.<method>()
TestCase person_test(std::int64_t fuel, const std::string& method, bool lazy = false) {
  TestCase t;
  t.stmts.push_back(Statement::construct("Car", {Arg::int_lit(fuel)}));
  t.stmts.push_back(Statement::construct("Person", {Arg::var(0)}));
  if (lazy) t.stmts.push_back(Statement::invoke(1, "setLazy", {Arg::bool_lit(true)}));
  t.stmts.push_back(Statement::invoke(1, method));
  return t;
}

struct Ev {
  std::string method, label;
  bool taken;
  bool operator==(const Ev&) const = default;
};

std::vector<Ev> events(const Trace& t) {
  std::vector<Ev> out;
  for (const auto& e : t.events) out.push_back({e.method, e.label, e.taken_true});
  return out;
}

}  // namespace

TEST(Execute, DriveToHomeWithEmptyTank) {
  const auto& prog = person_car();
  TestCase t = person_test(0, "driveToHome");
  ASSERT_FALSE(validate_test(prog.program(), t));
  Trace tr = execute_test(prog, t);
  // Hand simulation: 0 < 100 takes 5's true edge, lazy is false so 13 goes
  // to 16, and refuel sees 0 < 100.
  EXPECT_EQ(events(tr), (std::vector<Ev>{{"Person.driveToHome", "5", true},
                                         {"Person.addEnergy", "13", false},
                                         {"Car.refuel", "8", true}}));
  const Frame& add = tr.frames[tr.events[1].frame];
  EXPECT_EQ(add.site_method, "Person.driveToHome");
  EXPECT_EQ(add.site_label, "6c");
  const Frame& refuel = tr.frames[tr.events[2].frame];
  EXPECT_EQ(refuel.site_method, "Person.addEnergy");
  EXPECT_EQ(refuel.site_label, "16");
  ASSERT_EQ(tr.outcomes.size(), 3u);
  EXPECT_EQ(to_string(tr.outcomes[0]), "Car");
  EXPECT_EQ(to_string(tr.outcomes[2]), "void");
}

TEST(Execute, EmptyTest) {
  Trace tr = execute_test(person_car(), TestCase{});
  EXPECT_TRUE(tr.events.empty());
  EXPECT_TRUE(tr.frames.empty());
  EXPECT_TRUE(tr.outcomes.empty());
  EXPECT_EQ(tr.steps, 0);
}

TEST(Execute, NullReceiver) {
  TestCase t;
  t.stmts.push_back(Statement::assign(Type::ref("Car"), Arg::null_lit()));
  t.stmts.push_back(Statement::invoke(0, "drive"));
  t.stmts.push_back(Statement::construct("Car", {Arg::int_lit(1)}));
  Trace tr = execute_test(person_car(), t);
  ASSERT_EQ(tr.outcomes.size(), 1u);
  EXPECT_EQ(tr.outcomes[0].kind, OutcomeKind::Error);
  EXPECT_EQ(tr.outcomes[0].error, "null-deref");
  EXPECT_EQ(tr.outcomes[0].location, "test:1");
}

TEST(Execute, NullFieldInsideMethod) {
  TestCase t;
  t.stmts.push_back(Statement::construct("Person", {Arg::null_lit()}));
  t.stmts.push_back(Statement::invoke(0, "driveToHome"));
  Trace tr = execute_test(person_car(), t);
  ASSERT_EQ(tr.outcomes.size(), 2u);
  EXPECT_EQ(to_string(tr.outcomes[1]), "error:null-deref@Person.driveToHome:5");
}

TEST(Execute, RuntimeFaults) {
  auto prog = compile(
      "abstract class S { abstract method f() returns int; }\n"
      "class M {\n"
      "  method div(a: int, b: int) returns int { return a / b; }\n"
      "  method loop() { while (true) { } }\n"
      "  method rec(n: int) returns int { return rec(n + 1); }\n"
      "  method make() returns S { return new S(); }\n"
      "}");
  auto run = [&](const std::string& m, std::vector<Arg> args) {
    TestCase t;
    t.stmts.push_back(Statement::construct("M"));
    t.stmts.push_back(Statement::invoke(0, m, std::move(args)));
    return execute_test(prog, t);
  };
  EXPECT_EQ(to_string(run("div", {Arg::int_lit(7), Arg::int_lit(0)}).outcomes.back()), "error:div-by-zero@M.div:2");
  EXPECT_EQ(to_string(run("div", {Arg::int_lit(-7), Arg::int_lit(2)}).outcomes.back()), "-3");
  EXPECT_EQ(to_string(run("div", {Arg::int_lit(std::numeric_limits<std::int64_t>::min()), Arg::int_lit(-1)})
                          .outcomes.back()),
            std::to_string(std::numeric_limits<std::int64_t>::min()));
  Trace loop = run("loop", {});
  EXPECT_TRUE(loop.budget_exhausted);
  EXPECT_EQ(loop.steps, kDefaultBudget);
  EXPECT_EQ(loop.outcomes.back().kind, OutcomeKind::BudgetExhausted);
  EXPECT_EQ(run("rec", {Arg::int_lit(0)}).outcomes.back().error, "stack-overflow");
  EXPECT_EQ(run("make", {}).outcomes.back().error, "abstract-instantiation");
}

TEST(Execute, Deterministic) {
  TestCase t = person_test(42, "driveToHome", true);
  EXPECT_EQ(to_json(execute_test(person_car(), t)).dump(), to_json(execute_test(person_car(), t)).dump());
}

TEST(BranchDistance, RuleTable) {
  // fuelAmount < 100 at 150: true needs 150 - 100 + 1, false already holds.
  EXPECT_EQ(branch_distance(BinOp::Lt, 150, 100), (BranchDistance{51, 0}));
  EXPECT_EQ(branch_distance(BinOp::Lt, 50, 100), (BranchDistance{0, 50}));
  EXPECT_EQ(branch_distance(BinOp::Le, 100, 100), (BranchDistance{0, 1}));
  EXPECT_EQ(branch_distance(BinOp::Gt, 3, 7), (BranchDistance{5, 0}));
  EXPECT_EQ(branch_distance(BinOp::Ge, 7, 7), (BranchDistance{0, 1}));
  EXPECT_EQ(branch_distance(BinOp::Eq, 4, 4), (BranchDistance{0, 1}));
  EXPECT_EQ(branch_distance(BinOp::Eq, 4, 9), (BranchDistance{5, 0}));
  EXPECT_EQ(branch_distance(BinOp::Ne, 4, 4), (BranchDistance{1, 0}));
  EXPECT_EQ(bool_distance(false), (BranchDistance{1, 0}));
  EXPECT_EQ(bool_distance(true), (BranchDistance{0, 1}));
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
  EXPECT_EQ(branch_distance(BinOp::Eq, kMax, kMin).dist_true, kMax);
}

TEST(BranchDistance, LazyFieldAtNode13) {
  TestCase t = person_test(0, "addEnergy");
  Trace tr = execute_test(person_car(), t);
  ASSERT_FALSE(tr.events.empty());
  EXPECT_EQ(tr.events[0].label, "13");
  EXPECT_EQ(tr.events[0].dist_true, 1);
  EXPECT_EQ(tr.events[0].dist_false, 0);
}

TEST(BranchDistance, ConsistentWithTakenEdge) {
  for (std::int64_t fuel : {-1000, -1, 0, 99, 100, 101, 1000}) {
    for (bool lazy : {false, true}) {
      for (const char* m : {"driveToHome", "addEnergy"}) {
        Trace tr = execute_test(person_car(), person_test(fuel, m, lazy));
        for (const auto& e : tr.events) {
          EXPECT_EQ(std::min(e.dist_true, e.dist_false), 0);
          EXPECT_EQ(e.dist_true == 0, e.taken_true);
          EXPECT_GE(e.dist_true, 0);
          EXPECT_GE(e.dist_false, 0);
        }
      }
    }
  }
}

TEST(ApproachLevel, NestedGuards) {
  auto prog = compile(
      "class N {\n"
      "  method f(a: int, b: int, c: int) returns int {\n"
      "    if (a > 0) {\n"
      "      if (b > 0) {\n"
      "        if (c > 0) {\n"
      "          return 1;\n"
      "        }\n"
      "      }\n"
      "    }\n"
      "    return 0;\n"
      "  }\n"
      "}");
  Ccfg g = build_ccfg(prog, "N");
  BranchEdge target;
  for (const auto& e : branch_edges(g)) {
    if (e.from_label == "5" && e.polarity == Polarity::True) target = e;
  }
  ASSERT_EQ(target.from_label, "5");
  auto run = [&](std::int64_t a, std::int64_t b, std::int64_t c) {
    TestCase t;
    t.stmts.push_back(Statement::construct("N"));
    t.stmts.push_back(Statement::invoke(0, "f", {Arg::int_lit(a), Arg::int_lit(b), Arg::int_lit(c)}));
    return execute_test(prog, t);
  };
  // Hand-computed chain: 5 depends on 4 (true), which depends on 3 (true).
  EXPECT_EQ(approach_level(run(-1, 1, 1), target, g), 2);
  EXPECT_EQ(approach_level(run(1, -1, 1), target, g), 1);
  EXPECT_EQ(approach_level(run(1, 1, -1), target, g), 0);
  EXPECT_EQ(approach_level(run(1, 1, 1), target, g), 0);
  Approach far = approach(approach_levels(g, target), run(-1, 1, 1));
  EXPECT_EQ(far.distance, 2);  // a > 0 at a = -1
  EXPECT_EQ(approach_level(Trace{}, target, g), 3);
}

TEST(ApproachLevel, CalleeBranchExecuted) {
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  Trace tr = execute_test(person_car(), person_test(0, "driveToHome"));
  EXPECT_EQ(approach_level(tr, a.couples[0].callee, a.callee_ccfg), 0);
  EXPECT_EQ(approach_level(tr, a.couples[1].callee, a.callee_ccfg), 0);
}

TEST(Objective, WorkedTrace) {
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  ObjectiveEvaluator ev(a);
  // 13 -> 16 -> b8 -> b10 with a full tank.
  Trace tr = execute_test(person_car(), person_test(100, "addEnergy"));
  EXPECT_EQ(events(tr), (std::vector<Ev>{{"Person.addEnergy", "13", false}, {"Car.refuel", "8", false}}));
  ASSERT_EQ(a.couples[1].callee.to_label, "10");
  EXPECT_DOUBLE_EQ(ev.score(1, tr).value, 0.0);
  // The b9 couple: caller side met, b8 needs 100 < 100, distance 1.
  ObjectiveScore s = ev.score(0, tr);
  EXPECT_DOUBLE_EQ(s.caller_d, 0.0);
  EXPECT_EQ(s.callee.level, 0);
  EXPECT_EQ(s.callee.distance, 1);
  EXPECT_DOUBLE_EQ(s.value, normalize(1.0));
}

TEST(Objective, CallerMissedAddsOne) {
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  ObjectiveEvaluator ev(a);
  TestCase t;
  t.stmts.push_back(Statement::construct("Car", {Arg::int_lit(0)}));
  t.stmts.push_back(Statement::construct("Person", {Arg::var(0)}));
  t.stmts.push_back(Statement::invoke(1, "setLazy", {Arg::bool_lit(true)}));
  Trace tr = execute_test(person_car(), t);
  for (int c = 0; c < 2; ++c) {
    ObjectiveScore s = ev.score(c, tr);
    EXPECT_GT(s.caller_d, 0.0);
    EXPECT_DOUBLE_EQ(s.value, s.caller_d + 1.0);
  }
}

TEST(Objective, ZeroIffCoveredScoped) {
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  ObjectiveEvaluator ev(a);
  int zeros = 0;
  for (std::int64_t fuel : {-50, 0, 99, 100, 101, 500}) {
    for (bool lazy : {false, true}) {
      for (const char* m : {"driveToHome", "addEnergy", "setLazy"}) {
        TestCase t = person_test(fuel, m, lazy);
        if (std::string(m) == "setLazy") t.stmts.back().args = {Arg::bool_lit(false)};
        Trace tr = execute_test(person_car(), t);
        for (const auto& c : a.couples) {
          bool zero = ev.score(c.id, tr).value == 0.0;
          zeros += zero;
          EXPECT_EQ(zero, couple_covered(a, c, tr, CbcMatching::Scoped)) << fuel << lazy << m << c.id;
        }
      }
    }
  }
  EXPECT_GT(zeros, 0);
}

TEST(Objective, DistanceShrinksTowardsBoundary) {
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  ObjectiveEvaluator ev(a);
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t fuel = 300; fuel >= 100; fuel -= 7) {
    double v = ev.score(0, execute_test(person_car(), person_test(fuel, "addEnergy"))).value;
    EXPECT_LE(v, prev) << fuel;
    prev = v;
  }
}

TEST(CbcScore, WorkedTraceCoversHalf) {
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  Trace tr = execute_test(person_car(), person_test(100, "addEnergy"));
  EXPECT_DOUBLE_EQ(*cbc_score(a, {tr}), 0.5);
  EXPECT_DOUBLE_EQ(*cbc_score(a, {}), 0.0);
}

TEST(CbcScore, NotApplicableWithoutCouples) {
  PairAnalysis a = analyze_pair(person_car(), "Car", "Person");
  EXPECT_FALSE(cbc_score(a, {}).has_value());
}

TEST(CbcScore, ExhaustiveGridReachesFull) {
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  std::vector<Trace> all;
  for (std::int64_t fuel : {0, 50, 100, 150}) {
    for (bool lazy : {false, true}) {
      for (const char* m : {"driveToHome", "addEnergy"}) all.push_back(execute_test(person_car(), person_test(fuel, m, lazy)));
    }
  }
  EXPECT_DOUBLE_EQ(*cbc_score(a, all), 1.0);
}

TEST(CbcScore, MonotoneUnderUnionAndDuplication) {
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  std::vector<Trace> pool;
  for (std::int64_t fuel : {0, 100, 150}) pool.push_back(execute_test(person_car(), person_test(fuel, "addEnergy")));
  std::vector<Trace> acc;
  double prev = 0;
  for (const auto& t : pool) {
    acc.push_back(t);
    double s = *cbc_score(a, acc);
    EXPECT_GE(s, prev);
    prev = s;
    std::vector<Trace> doubled = acc;
    doubled.insert(doubled.end(), acc.begin(), acc.end());
    EXPECT_DOUBLE_EQ(*cbc_score(a, doubled), s);
  }
}

TEST(CbcScore, ScopedIgnoresCalleeBranchOutsideSite) {
  // refuel is first called directly, then through addEnergy at site 16.
  TestCase t;
  t.stmts.push_back(Statement::construct("Car", {Arg::int_lit(0)}));
  t.stmts.push_back(Statement::invoke(0, "refuel"));
  t.stmts.push_back(Statement::construct("Person", {Arg::var(0)}));
  t.stmts.push_back(Statement::invoke(2, "addEnergy"));
  PairAnalysis a = analyze_pair(person_car(), "Person", "Car");
  Trace tr = execute_test(person_car(), t);
  EXPECT_DOUBLE_EQ(*cbc_score(a, {tr}, CbcMatching::Scoped), 0.5);
  EXPECT_DOUBLE_EQ(*cbc_score(a, {tr}, CbcMatching::WholeTest), 1.0);
}
