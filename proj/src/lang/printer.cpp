#include <sstream>

#include "cbc/lang/parser.hpp"

namespace cbc {

namespace {

void print_expr(std::ostream& os, const Expr& e);

void print_args(std::ostream& os, const Expr& e, std::size_t first) {
  os << '(';
  for (std::size_t i = first; i < e.kids.size(); ++i) {
    if (i != first) os << ", ";
    print_expr(os, e.kids[i]);
  }
  os << ')';
}

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: os << e.int_value; break;
    case ExprKind::BoolLit: os << (e.bool_value ? "true" : "false"); break;
    case ExprKind::NullLit: os << "null"; break;
    case ExprKind::This: os << "this"; break;
    case ExprKind::Name: os << e.name; break;
    case ExprKind::Field:
      print_expr(os, e.kids.front());
      os << '.' << e.name;
      break;
    case ExprKind::Call:
      if (!e.implicit_receiver) {
        print_expr(os, e.kids.front());
        os << '.';
      }
      os << e.name;
      print_args(os, e, e.first_arg());
      break;
    case ExprKind::New:
      os << "new " << e.name;
      print_args(os, e, 0);
      break;
    case ExprKind::Unary:
      os << (e.unop == UnOp::Neg ? "-" : "!") << '(';
      print_expr(os, e.kids.front());
      os << ')';
      break;
    case ExprKind::Binary:
      os << '(';
      print_expr(os, e.kids[0]);
      os << ' ' << to_string(e.binop) << ' ';
      print_expr(os, e.kids[1]);
      os << ')';
      break;
  }
}

void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent);

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  os << pad;
  switch (s.kind) {
    case StmtKind::Assign:
      os << s.target << " = ";
      print_expr(os, s.exprs.front());
      os << ";\n";
      break;
    case StmtKind::FieldAssign:
      print_expr(os, s.exprs[0]);
      os << '.' << s.target << " = ";
      print_expr(os, s.exprs[1]);
      os << ";\n";
      break;
    case StmtKind::If:
      os << "if (";
      print_expr(os, s.exprs.front());
      os << ") ";
      print_block(os, s.body, indent);
      if (s.has_else) {
        os << " else ";
        print_block(os, s.else_body, indent);
      }
      os << '\n';
      break;
    case StmtKind::While:
      os << "while (";
      print_expr(os, s.exprs.front());
      os << ") ";
      print_block(os, s.body, indent);
      os << '\n';
      break;
    case StmtKind::Return:
      os << "return";
      if (!s.exprs.empty()) {
        os << ' ';
        print_expr(os, s.exprs.front());
      }
      os << ";\n";
      break;
    case StmtKind::ExprStmt:
      print_expr(os, s.exprs.front());
      os << ";\n";
      break;
  }
}

void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent) {
  os << "{\n";
  for (const auto& s : body) print_stmt(os, s, indent + 1);
  os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << '}';
}

void print_params(std::ostream& os, const std::vector<Param>& params) {
  os << '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) os << ", ";
    os << params[i].name << ": " << to_string(params[i].type);
  }
  os << ')';
}

}  // namespace

std::string print_program(const Program& program) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, cls] : program.classes) {
    if (!first) os << '\n';
    first = false;
    if (cls.declared_abstract) os << "abstract ";
    os << "class " << cls.name;
    if (cls.superclass) os << " extends " << *cls.superclass;
    os << " {\n";
    for (const auto& f : cls.fields) {
      os << "  " << to_string(f.visibility) << " field " << f.name << ": " << to_string(f.type) << ";\n";
    }
    for (const auto& c : cls.constructors) {
      os << "  " << to_string(c.visibility) << " ctor";
      print_params(os, c.params);
      os << ' ';
      print_block(os, c.body, 1);
      os << '\n';
    }
    for (const auto& m : cls.methods) {
      os << "  " << to_string(m.visibility) << (m.is_abstract ? " abstract" : "") << " method " << m.name;
      print_params(os, m.params);
      if (m.return_type.base != BaseType::Void) os << " returns " << to_string(m.return_type);
      if (m.is_abstract) {
        os << ";\n";
      } else {
        os << ' ';
        print_block(os, m.body, 1);
        os << '\n';
      }
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace cbc
