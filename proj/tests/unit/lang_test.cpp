#include <gtest/gtest.h>

#include "cbc/errors.hpp"
#include "cbc/lang/parser.hpp"
#include "cbc/lang/resolve.hpp"
#include "test_util.hpp"

using namespace cbc;
using cbc::testing::read_fixture;

namespace {

bool calls_method(const std::vector<Stmt>& body, const std::string& name);

bool expr_calls(const Expr& e, const std::string& name) {
  if (e.kind == ExprKind::Call && e.name == name) return true;
  for (const auto& k : e.kids) {
    if (expr_calls(k, name)) return true;
  }
  return false;
}

bool calls_method(const std::vector<Stmt>& body, const std::string& name) {
  for (const auto& s : body) {
    for (const auto& e : s.exprs) {
      if (expr_calls(e, name)) return true;
    }
    if (calls_method(s.body, name) || calls_method(s.else_body, name)) return true;
  }
  return false;
}

}  // namespace

TEST(Parse, PersonCarHasTwoClasses) {
  Program p = parse_program(read_fixture("person_car.moo"));
  ASSERT_EQ(p.classes.size(), 2u);
  const MethodDef* drive = p.get_class("Person").find_declared("driveToHome");
  ASSERT_NE(drive, nullptr);
  EXPECT_TRUE(calls_method(drive->body, "addEnergy"));
  EXPECT_EQ(lookup_dispatch(p, "Person", "addEnergy").key(), "Person.addEnergy");
}

TEST(Parse, EmptySource) { EXPECT_TRUE(parse_program("").classes.empty()); }

TEST(Parse, CyclicInheritanceRejected) {
  try {
    parse_program("class A extends B {} class B extends A {}");
    FAIL() << "expected a resolution error";
  } catch (const ResolveError& e) {
    EXPECT_NE(std::string(e.what()).find("cyclic"), std::string::npos) << e.what();
  }
}

TEST(Parse, SyntaxErrorReportsPositionAndExpected) {
  try {
    parse_program("class A {\n  method m() { x = ; }\n}");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.pos().line, 2);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Parse, ResolutionErrors) {
  EXPECT_THROW(parse_program("class A extends Nope {}"), ResolveError);
  EXPECT_THROW(parse_program("class A { method m() { x = y; } }"), ResolveError);
  EXPECT_THROW(parse_program("class A { method m() { foo(); } }"), ResolveError);
  EXPECT_THROW(parse_program("class A { field f: int; } class B extends A { field f: int; }"), ResolveError);
  EXPECT_THROW(parse_program("class A { method m(x: int) {} } class B extends A { method m(x: bool) {} }"),
               ResolveError);
  EXPECT_THROW(parse_program("class A { method m() returns int { if (true) { return 1; } } }"), ResolveError);
  EXPECT_THROW(parse_program("class A { method m() returns int { return true; } }"), ResolveError);
}

TEST(Parse, AbstractClassNotInstantiable) {
  Program p = parse_program(
      "abstract class S { abstract method f() returns int; }\n"
      "class T extends S { method f() returns int { return 1; } }");
  EXPECT_FALSE(is_instantiable(p, "S"));
  EXPECT_TRUE(is_instantiable(p, "T"));
}

TEST(Dispatch, OverrideAndInherited) {
  Program p = parse_program(read_fixture("green_person.moo"));
  EXPECT_EQ(lookup_dispatch(p, "GreenPerson", "addEnergy").key(), "GreenPerson.addEnergy");
  EXPECT_EQ(lookup_dispatch(p, "GreenPerson", "driveToHome").key(), "Person.driveToHome");
  EXPECT_EQ(lookup_dispatch(p, "Person", "addEnergy").key(), "Person.addEnergy");
  EXPECT_THROW(lookup_dispatch(p, "Person", "chargerAvailable"), NoSuchMethodError);
  EXPECT_THROW(lookup_dispatch(p, "Nope", "x"), UnknownClassError);
}

TEST(Dispatch, UndeclaredMethodsFollowParent) {
  Program p = parse_program(read_fixture("green_person.moo"));
  for (const auto& [name, cls] : p.classes) {
    if (!cls.superclass) continue;
    for (const MethodDef* m : visible_methods(p, *cls.superclass)) {
      if (cls.find_declared(m->name)) continue;
      EXPECT_EQ(&lookup_dispatch(p, name, m->name), &lookup_dispatch(p, *cls.superclass, m->name));
    }
  }
}

TEST(Print, FixpointOnFixtures) {
  for (const char* f : {"person_car.moo", "green_person.moo"}) {
    Program p = parse_program(read_fixture(f));
    std::string once = print_program(p);
    std::string twice = print_program(parse_program(once));
    EXPECT_EQ(once, twice) << f;
  }
}
