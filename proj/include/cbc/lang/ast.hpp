#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cbc {

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class BaseType { Int, Bool, Ref, Void, Null };

/// Semantic type of a MiniOO value. `class_name` is set only for Ref.
struct Type {
  BaseType base = BaseType::Void;
  std::string class_name;

  static Type int_type() { return {BaseType::Int, {}}; }
  static Type bool_type() { return {BaseType::Bool, {}}; }
  static Type void_type() { return {BaseType::Void, {}}; }
  static Type null_type() { return {BaseType::Null, {}}; }
  static Type ref(std::string cls) { return {BaseType::Ref, std::move(cls)}; }

  bool is_ref() const { return base == BaseType::Ref; }
  bool operator==(const Type&) const = default;
};

std::string to_string(const Type& t);

enum class Visibility { Public, Protected, Private };

std::string to_string(Visibility v);

enum class ExprKind { IntLit, BoolLit, NullLit, This, Name, Field, Call, New, Unary, Binary };
enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Lt, Le, Eq, Ne, Gt, Ge, And, Or };

const char* to_string(BinOp op);
bool is_relational(BinOp op);
bool is_logical(BinOp op);

/// Where a bare name resolved to.
enum class NameBinding { Unresolved, Local, Field };

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourcePos pos;
  std::int64_t int_value = 0;
  bool bool_value = false;
  // Name: identifier; Field: field name; Call: method name; New: class name.
  std::string name;
  UnOp unop = UnOp::Neg;
  BinOp binop = BinOp::Add;
  // Field: [object]; Call: [receiver?] + args; New: args; Unary: [operand];
  // Binary: [lhs, rhs].
  std::vector<Expr> kids;
  // Call only: receiver omitted in source (implicit this).
  bool implicit_receiver = false;

  // Filled by the resolver.
  Type type;
  NameBinding binding = NameBinding::Unresolved;
  int slot = -1;              // Local slot
  std::string owner_class;    // Field: declaring class; Call: static receiver class

  const Expr* receiver() const { return implicit_receiver ? nullptr : &kids.front(); }
  std::size_t first_arg() const { return (kind == ExprKind::Call && !implicit_receiver) ? 1 : 0; }
};

enum class StmtKind { Assign, FieldAssign, If, While, Return, ExprStmt };

struct Stmt {
  StmtKind kind = StmtKind::ExprStmt;
  SourcePos pos;
  // Assign: variable/field name; FieldAssign: field name.
  std::string target;
  // Assign: [value]; FieldAssign: [object, value]; If/While: [cond];
  // Return: [] or [value]; ExprStmt: [call or new].
  std::vector<Expr> exprs;
  std::vector<Stmt> body;       // If then-branch / While body
  std::vector<Stmt> else_body;  // If else-branch
  bool has_else = false;

  // Filled by the resolver (Assign only).
  NameBinding binding = NameBinding::Unresolved;
  int slot = -1;
  std::string owner_class;
};

struct Param {
  std::string name;
  Type type;
};

struct FieldDef {
  std::string name;
  Type type;
  Visibility visibility = Visibility::Public;
  SourcePos pos;
};

struct MethodDef {
  std::string name;  // "<init>" for constructors
  std::string owner;
  std::vector<Param> params;
  Type return_type = Type::void_type();
  Visibility visibility = Visibility::Public;
  bool is_abstract = false;
  bool is_ctor = false;
  std::vector<Stmt> body;
  SourcePos pos;

  // Filled by the resolver: params first, then named locals in order of
  // first assignment.
  std::vector<Param> locals;

  std::string key() const { return owner + "." + name; }
};

struct ClassDef {
  std::string name;
  std::optional<std::string> superclass;
  bool declared_abstract = false;
  std::vector<FieldDef> fields;
  std::vector<MethodDef> methods;
  std::vector<MethodDef> constructors;  // at most one
  SourcePos pos;

  const MethodDef* find_declared(const std::string& method) const;
  const MethodDef* ctor() const { return constructors.empty() ? nullptr : &constructors.front(); }
};

/// A resolved MiniOO program: a library of classes, no entry point.
struct Program {
  std::map<std::string, ClassDef> classes;

  const ClassDef* find_class(const std::string& name) const;
  const ClassDef& get_class(const std::string& name) const;
};

}  // namespace cbc
