#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbc/lang/ast.hpp"

namespace cbc {

/// Argument of a statement: a literal or the value of an earlier statement.
struct Arg {
  enum class Kind { Int, Bool, Null, Ref };
  Kind kind = Kind::Int;
  std::int64_t value = 0;  // Int, Bool (0/1)
  int ref = -1;            // Ref: statement index

  static Arg int_lit(std::int64_t v) { return {Kind::Int, v, -1}; }
  static Arg bool_lit(bool v) { return {Kind::Bool, v ? 1 : 0, -1}; }
  static Arg null_lit() { return {Kind::Null, 0, -1}; }
  static Arg var(int stmt) { return {Kind::Ref, 0, stmt}; }
  bool operator==(const Arg&) const = default;
};

struct Statement {
  enum class Kind { Construct, Assign, Invoke };
  Kind kind = Kind::Construct;
  std::string class_name;  // Construct
  Type type;               // Assign: declared type of the literal
  Arg literal;             // Assign
  int receiver = -1;       // Invoke: statement index
  std::string method;      // Invoke: method name
  std::vector<Arg> args;   // Construct / Invoke

  static Statement construct(std::string cls, std::vector<Arg> args = {});
  static Statement assign(Type type, Arg literal);
  static Statement invoke(int receiver, std::string method, std::vector<Arg> args = {});
  bool operator==(const Statement&) const = default;
};

/// A test is a straight-line sequence; statement i's value is variable i.
struct TestCase {
  std::vector<Statement> stmts;
  bool operator==(const TestCase&) const = default;
};

/// Static type of statement `i`'s value (Void for void invokes). Requires a
/// valid prefix.
Type statement_type(const Program& program, const TestCase& t, int i);

/// Method an invoke statement reaches on its receiver's static type.
const MethodDef* invoked_method(const Program& program, const TestCase& t, int i);

/// Empty when every statement is well-typed and refers only to earlier
/// statements; otherwise a description of the first problem.
std::optional<std::string> validate_test(const Program& program, const TestCase& t);

/// One statement per line, `vN = ...` style.
std::string to_source(const Program& program, const TestCase& t);

}  // namespace cbc
