#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "cbc/cfg/ccfg.hpp"
#include "cbc/errors.hpp"
#include "cbc/lang/parser.hpp"
#include "cbc/lang/resolve.hpp"
#include "test_util.hpp"

using namespace cbc;
using cbc::testing::read_fixture;

namespace {

CompiledProgram compile(const std::string& src) { return CompiledProgram(parse_program(src)); }

std::vector<std::string> edge_lines(const MethodCfg& cfg) {
  std::vector<std::string> out;
  for (const auto& e : cfg.edges()) {
    out.push_back(cfg.nodes[e.from].label + " -> " + cfg.nodes[e.to].label + " " + to_string(e.polarity));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<std::string> method_keys(const Ccfg& g) {
  std::set<std::string> out;
  for (const auto& m : g.methods) out.insert(m->key());
  return out;
}

// Structural invariants every method CFG must satisfy.
void check_wellformed(const MethodCfg& cfg) {
  const int n = static_cast<int>(cfg.nodes.size());
  std::vector<bool> seen(n, false);
  std::vector<int> stack{MethodCfg::kEntry};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (seen[x]) continue;
    seen[x] = true;
    for (int s : cfg.nodes[x].succ) stack.push_back(s);
  }
  for (int x = 0; x < n; ++x) {
    const CfgNode& node = cfg.nodes[x];
    EXPECT_TRUE(seen[x]) << cfg.key() << " " << node.label;
    if (node.is_branch()) EXPECT_EQ(node.succ.size(), 2u) << node.label;
    if (node.is_call()) EXPECT_EQ(node.succ.size(), 1u) << node.label;
    if (x != MethodCfg::kExit) EXPECT_FALSE(node.succ.empty()) << node.label;
  }
  EXPECT_TRUE(cfg.nodes[MethodCfg::kExit].succ.empty());
}

}  // namespace

TEST(MethodCfg, DriveToHomeSplitsThisCall) {
  auto prog = compile(read_fixture("person_car.moo"));
  const MethodCfg& cfg = *prog.cfg("Person.driveToHome");
  check_wellformed(cfg);
  EXPECT_EQ(edge_lines(cfg), (std::vector<std::string>{
                                 "5 -> 6c true",
                                 "5 -> 8 false",
                                 "6c -> 6r unconditional",
                                 "6r -> Exit unconditional",
                                 "8 -> Exit unconditional",
                                 "Entry -> 5 unconditional",
                             }));
  EXPECT_TRUE(cfg.nodes[*cfg.find("6c")].call->on_this);
  EXPECT_FALSE(cfg.nodes[*cfg.find("8")].call->on_this);
}

TEST(MethodCfg, StraightLineHasNoBranches) {
  auto prog = compile("class A { method m() returns int { return 1; } }");
  const MethodCfg& cfg = *prog.cfg("A.m");
  EXPECT_EQ(cfg.nodes.size(), 3u);
  EXPECT_TRUE(cfg.branching_nodes().empty());
  EXPECT_EQ(edge_lines(cfg), (std::vector<std::string>{"1 -> Exit unconditional", "Entry -> 1 unconditional"}));
}

TEST(MethodCfg, WhileOverIfMatchesGolden) {
  auto prog = compile(read_fixture("loop_if.moo"));
  const MethodCfg& cfg = *prog.cfg("Counter.run");
  check_wellformed(cfg);
  std::istringstream golden(read_fixture("loop_if.golden"));
  std::vector<std::string> expected;
  for (std::string line; std::getline(golden, line);) {
    if (!line.empty() && line[0] != '#') expected.push_back(line);
  }
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(edge_lines(cfg), expected);
  EXPECT_EQ(cfg.branching_nodes().size(), 2u);
}

TEST(MethodCfg, ShortCircuitGivesOneConditionPerNode) {
  auto prog = compile(
      "class A {\n"
      "  field x: int;\n"
      "  method m(a: int, b: bool) returns bool {\n"
      "    if (a < 1 && (b || !(a == 7))) { x = 1; }\n"
      "    c = a > 2 || b;\n"
      "    return c;\n"
      "  }\n"
      "}");
  const MethodCfg& cfg = *prog.cfg("A.m");
  check_wellformed(cfg);
  EXPECT_EQ(cfg.branching_nodes().size(), 5u);
  for (int n : cfg.branching_nodes()) {
    const Expr& c = *cfg.nodes[n].condition;
    bool atomic = (c.kind == ExprKind::Binary && is_relational(c.binop)) || c.type.base == BaseType::Bool;
    EXPECT_TRUE(atomic);
    EXPECT_FALSE(c.kind == ExprKind::Binary && is_logical(c.binop));
    EXPECT_FALSE(c.kind == ExprKind::Unary && c.unop == UnOp::Not);
  }
}

TEST(MethodCfg, CallInConditionPrecedesBranch) {
  auto prog = compile(read_fixture("green_person.moo"));
  const MethodCfg& cfg = *prog.cfg("GreenPerson.addEnergy");
  check_wellformed(cfg);
  auto r = cfg.find("7r");
  ASSERT_TRUE(r);
  EXPECT_TRUE(cfg.nodes[*r].is_branch());
  EXPECT_EQ(cfg.nodes[*cfg.find("7c")].succ, std::vector<int>{*r});
}

TEST(MethodCfg, UnreachableCodeRejected) {
  EXPECT_THROW(compile("class A { method m() returns int { return 1; x = 2; } }"), CfgError);
  EXPECT_THROW(
      compile("class A { method m(b: bool) returns int { if (b) { return 1; } else { return 2; } x = 3; } }"),
      CfgError);
}

TEST(Ccfg, PersonPlainWiresAddEnergy) {
  auto prog = compile(read_fixture("person_car.moo"));
  Ccfg g = build_ccfg(prog, "Person");
  auto keys = method_keys(g);
  EXPECT_TRUE(keys.count("Person.driveToHome"));
  EXPECT_TRUE(keys.count("Person.addEnergy"));
  int c6 = *g.find("Person.driveToHome", "6c");
  EXPECT_EQ(g.linked_callee(c6), "Person.addEnergy");
  Digraph d = g.digraph();
  int entry = g.id(g.method_index("Person.addEnergy"), MethodCfg::kEntry);
  EXPECT_EQ(d.succ[c6], std::vector<int>{entry});
  // The external call to Car.drive stays a plain node.
  EXPECT_FALSE(g.linked_callee(*g.find("Person.driveToHome", "8")));
}

TEST(Ccfg, GreenPersonSubclassRole) {
  auto prog = compile(read_fixture("green_person.moo"));
  Ccfg g = build_ccfg(prog, "GreenPerson", CcfgRole::SubclassOfPair, "Person");
  EXPECT_EQ(method_keys(g), (std::set<std::string>{"GreenPerson.addEnergy", "GreenPerson.chargerAvailable"}));
}

TEST(Ccfg, PersonSuperclassRole) {
  auto prog = compile(read_fixture("green_person.moo"));
  Ccfg g = build_ccfg(prog, "Person", CcfgRole::SuperclassOfPair, "GreenPerson");
  auto keys = method_keys(g);
  EXPECT_FALSE(keys.count("Person.addEnergy"));
  EXPECT_TRUE(keys.count("Person.driveToHome"));
  int c6 = *g.find("Person.driveToHome", "6c");
  EXPECT_FALSE(g.linked_callee(c6));
  Digraph d = g.digraph();
  EXPECT_EQ(d.succ[c6], std::vector<int>{*g.find("Person.driveToHome", "6r")});
}

TEST(Ccfg, Errors) {
  auto prog = compile(read_fixture("green_person.moo"));
  EXPECT_THROW(build_ccfg(prog, "Nope"), UnknownClassError);
  EXPECT_THROW(build_ccfg(prog, "Person", CcfgRole::SuperclassOfPair, "Car"), Error);
  EXPECT_THROW(build_ccfg(prog, "Person", CcfgRole::SubclassOfPair, "GreenPerson"), Error);
  EXPECT_THROW(build_ccfg(prog, "Person", CcfgRole::SuperclassOfPair), Error);
}

TEST(Ccfg, NodeCountConservation) {
  for (const char* f : {"person_car.moo", "green_person.moo", "loop_if.moo"}) {
    auto prog = compile(read_fixture(f));
    for (const auto& [name, cls] : prog.program().classes) {
      Ccfg g = build_ccfg(prog, name);
      std::size_t total = 0;
      for (const auto& m : g.methods) total += m->nodes.size();
      EXPECT_EQ(static_cast<std::size_t>(g.size()), total) << name;
      for (const auto& l : g.links) {
        EXPECT_LT(l.from, g.size());
        EXPECT_LT(l.to, g.size());
      }
    }
  }
}

TEST(Ccfg, RolePartition) {
  auto prog = compile(read_fixture("green_person.moo"));
  const Program& p = prog.program();
  Ccfg super = build_ccfg(prog, "Person", CcfgRole::SuperclassOfPair, "GreenPerson");
  Ccfg sub = build_ccfg(prog, "GreenPerson", CcfgRole::SubclassOfPair, "Person");
  std::set<std::string> sup_keys = method_keys(super), sub_keys = method_keys(sub);
  sup_keys.erase("Person.<init>");
  std::set<std::string> inherited;
  for (const MethodDef* m : visible_methods(p, "GreenPerson")) {
    if (m->owner != "GreenPerson") inherited.insert(m->key());
  }
  std::set<std::string> all;
  for (const MethodDef* m : visible_methods(p, "GreenPerson")) all.insert(m->key());
  std::set<std::string> unioned = sup_keys;
  unioned.insert(sub_keys.begin(), sub_keys.end());
  unioned.insert(inherited.begin(), inherited.end());
  EXPECT_EQ(unioned, all);
  for (const auto& k : sup_keys) EXPECT_FALSE(sub_keys.count(k)) << k;
}

TEST(CallSites, PersonToCar) {
  auto prog = compile(read_fixture("person_car.moo"));
  Ccfg g = build_ccfg(prog, "Person");
  auto sites = find_call_sites(prog, g, "Car");
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_EQ(sites[0].caller_method, "Person.addEnergy");
  EXPECT_EQ(sites[0].label, "16");
  EXPECT_EQ(sites[0].callees, std::vector<std::string>{"Car.refuel"});
  EXPECT_EQ(sites[1].caller_method, "Person.driveToHome");
  EXPECT_EQ(sites[1].label, "8");
  EXPECT_EQ(sites[1].callees, std::vector<std::string>{"Car.drive"});
}

TEST(CallSites, SuperclassCallsRedefinedMethod) {
  auto prog = compile(read_fixture("green_person.moo"));
  Ccfg g = build_ccfg(prog, "Person", CcfgRole::SuperclassOfPair, "GreenPerson");
  auto sites = find_call_sites(prog, g, "GreenPerson");
  ASSERT_EQ(sites.size(), 2u);
  std::set<std::string> labels{sites[0].label, sites[1].label};
  EXPECT_EQ(labels, (std::set<std::string>{"6c", "13c"}));
  for (const auto& s : sites) EXPECT_EQ(s.callees, std::vector<std::string>{"GreenPerson.addEnergy"});
}

TEST(CallSites, SubclassCallsInheritedMethod) {
  auto prog = compile(read_fixture("green_person.moo"));
  Ccfg g = build_ccfg(prog, "GreenPerson", CcfgRole::SubclassOfPair, "Person");
  auto sites = find_call_sites(prog, g, "Person");
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].label, "7c");
  EXPECT_EQ(sites[0].callees, std::vector<std::string>{"Person.stationsOpen"});
}

TEST(CallSites, DotExportMentionsEveryMethod) {
  auto prog = compile(read_fixture("person_car.moo"));
  std::string dot = build_ccfg(prog, "Person").to_dot();
  EXPECT_NE(dot.find("cluster_Person.driveToHome"), std::string::npos);
  EXPECT_NE(dot.find("style=dashed"), std::string::npos);
}
