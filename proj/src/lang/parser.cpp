#include "cbc/lang/parser.hpp"

#include <utility>

#include "cbc/errors.hpp"
#include "cbc/lang/lexer.hpp"
#include "cbc/lang/resolve.hpp"

namespace cbc {

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program prog;
    while (peek().kind != Tok::End) {
      ClassDef cls = class_decl();
      SourcePos pos = cls.pos;
      std::string name = cls.name;
      if (!prog.classes.emplace(name, std::move(cls)).second) {
        throw ResolveError(pos, "duplicate class '" + name + "'");
      }
    }
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  bool at(std::string_view text) const {
    const Token& t = peek();
    return (t.kind == Tok::Punct || t.kind == Tok::Keyword) && t.text == text;
  }

  bool accept(std::string_view text) {
    if (at(text)) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.pos, found, std::move(expected));
  }

  const Token& expect(std::string_view text) {
    if (!at(text)) fail({"'" + std::string(text) + "'"});
    return toks_[pos_++];
  }

  std::string ident() {
    if (peek().kind != Tok::Ident) fail({"identifier"});
    return toks_[pos_++].text;
  }

  Type type_name() {
    if (accept("int")) return Type::int_type();
    if (accept("bool")) return Type::bool_type();
    if (peek().kind == Tok::Ident) return Type::ref(ident());
    fail({"'int'", "'bool'", "class name"});
  }

  std::optional<Visibility> visibility() {
    if (accept("public")) return Visibility::Public;
    if (accept("protected")) return Visibility::Protected;
    if (accept("private")) return Visibility::Private;
    return std::nullopt;
  }

  ClassDef class_decl() {
    ClassDef cls;
    cls.pos = peek().pos;
    cls.declared_abstract = accept("abstract");
    if (!at("class")) fail(cls.declared_abstract ? std::vector<std::string>{"'class'"}
                                                 : std::vector<std::string>{"'class'", "'abstract'"});
    cls.pos = expect("class").pos;
    cls.name = ident();
    if (accept("extends")) cls.superclass = ident();
    expect("{");
    while (!accept("}")) member(cls);
    return cls;
  }

  std::vector<Param> params() {
    std::vector<Param> out;
    expect("(");
    if (accept(")")) return out;
    do {
      Param p;
      p.name = ident();
      expect(":");
      p.type = type_name();
      out.push_back(std::move(p));
    } while (accept(","));
    expect(")");
    return out;
  }

  void member(ClassDef& cls) {
    SourcePos start = peek().pos;
    auto vis = visibility();
    if (accept("field")) {
      FieldDef f;
      f.pos = start;
      f.visibility = vis.value_or(Visibility::Public);
      f.name = ident();
      expect(":");
      f.type = type_name();
      expect(";");
      cls.fields.push_back(std::move(f));
      return;
    }
    if (accept("ctor")) {
      MethodDef m;
      m.pos = start;
      m.name = "<init>";
      m.owner = cls.name;
      m.is_ctor = true;
      m.visibility = vis.value_or(Visibility::Public);
      m.params = params();
      m.body = block();
      cls.constructors.push_back(std::move(m));
      return;
    }
    MethodDef m;
    m.pos = start;
    m.owner = cls.name;
    m.visibility = vis.value_or(Visibility::Public);
    m.is_abstract = accept("abstract");
    if (!accept("method")) {
      if (vis || m.is_abstract) fail({"'method'", "'field'", "'ctor'"});
      fail({"'field'", "'ctor'", "'method'", "visibility", "'}'"});
    }
    m.name = ident();
    m.params = params();
    if (accept("returns")) m.return_type = type_name();
    if (m.is_abstract) {
      expect(";");
    } else {
      m.body = block();
    }
    cls.methods.push_back(std::move(m));
  }

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> out;
    while (!accept("}")) {
      if (peek().kind == Tok::End) fail({"statement", "'}'"});
      out.push_back(statement());
    }
    return out;
  }

  Stmt if_stmt() {
    Stmt s;
    s.kind = StmtKind::If;
    s.pos = expect("if").pos;
    expect("(");
    s.exprs.push_back(expr());
    expect(")");
    s.body = block();
    if (accept("else")) {
      s.has_else = true;
      if (at("if")) {
        s.else_body.push_back(if_stmt());
      } else {
        s.else_body = block();
      }
    }
    return s;
  }

  Stmt statement() {
    if (at("if")) return if_stmt();
    Stmt s;
    s.pos = peek().pos;
    if (accept("while")) {
      s.kind = StmtKind::While;
      expect("(");
      s.exprs.push_back(expr());
      expect(")");
      s.body = block();
      return s;
    }
    if (accept("return")) {
      s.kind = StmtKind::Return;
      if (!accept(";")) {
        s.exprs.push_back(expr());
        expect(";");
      }
      return s;
    }
    Expr lhs = expr();
    if (accept("=")) {
      if (lhs.kind == ExprKind::Name) {
        s.kind = StmtKind::Assign;
        s.target = lhs.name;
      } else if (lhs.kind == ExprKind::Field) {
        s.kind = StmtKind::FieldAssign;
        s.target = lhs.name;
        s.exprs.push_back(std::move(lhs.kids.front()));
      } else {
        throw SyntaxError(lhs.pos, "expression", {"variable or field on the left of '='"});
      }
      s.exprs.push_back(expr());
      expect(";");
      return s;
    }
    if (lhs.kind != ExprKind::Call && lhs.kind != ExprKind::New) {
      fail({"'='"});
    }
    s.kind = StmtKind::ExprStmt;
    s.exprs.push_back(std::move(lhs));
    expect(";");
    return s;
  }

  // Precedence, loosest first: || , && , == != , < <= > >= , + - , * / , unary.
  Expr expr() { return binary(0); }

  static int precedence(BinOp op) {
    switch (op) {
      case BinOp::Or: return 0;
      case BinOp::And: return 1;
      case BinOp::Eq:
      case BinOp::Ne: return 2;
      case BinOp::Lt:
      case BinOp::Le:
      case BinOp::Gt:
      case BinOp::Ge: return 3;
      case BinOp::Add:
      case BinOp::Sub: return 4;
      case BinOp::Mul:
      case BinOp::Div: return 5;
    }
    return -1;
  }

  std::optional<BinOp> peek_binop() const {
    const Token& t = peek();
    if (t.kind != Tok::Punct) return std::nullopt;
    static const std::pair<std::string_view, BinOp> table[] = {
        {"||", BinOp::Or}, {"&&", BinOp::And}, {"==", BinOp::Eq}, {"!=", BinOp::Ne},
        {"<", BinOp::Lt},  {"<=", BinOp::Le},  {">", BinOp::Gt},  {">=", BinOp::Ge},
        {"+", BinOp::Add}, {"-", BinOp::Sub},  {"*", BinOp::Mul}, {"/", BinOp::Div}};
    for (const auto& [text, op] : table) {
      if (t.text == text) return op;
    }
    return std::nullopt;
  }

  Expr binary(int min_prec) {
    Expr lhs = unary();
    while (true) {
      auto op = peek_binop();
      if (!op || precedence(*op) < min_prec) break;
      Expr e;
      e.kind = ExprKind::Binary;
      e.pos = peek().pos;
      e.binop = *op;
      ++pos_;
      Expr rhs = binary(precedence(*op) + 1);
      e.kids.push_back(std::move(lhs));
      e.kids.push_back(std::move(rhs));
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr unary() {
    if (at("!") || at("-")) {
      Expr e;
      e.kind = ExprKind::Unary;
      e.pos = peek().pos;
      e.unop = at("!") ? UnOp::Not : UnOp::Neg;
      ++pos_;
      e.kids.push_back(unary());
      return e;
    }
    return postfix();
  }

  void args(Expr& call) {
    expect("(");
    if (accept(")")) return;
    do {
      call.kids.push_back(expr());
    } while (accept(","));
    expect(")");
  }

  Expr postfix() {
    Expr e = primary();
    while (accept(".")) {
      SourcePos p = peek().pos;
      std::string member = ident();
      Expr outer;
      outer.pos = p;
      outer.name = std::move(member);
      outer.kids.push_back(std::move(e));
      if (at("(")) {
        outer.kind = ExprKind::Call;
        args(outer);
      } else {
        outer.kind = ExprKind::Field;
      }
      e = std::move(outer);
    }
    return e;
  }

  Expr primary() {
    const Token& t = peek();
    Expr e;
    e.pos = t.pos;
    if (t.kind == Tok::IntLit) {
      e.kind = ExprKind::IntLit;
      e.int_value = t.value;
      ++pos_;
      return e;
    }
    if (accept("true") || accept("false")) {
      e.kind = ExprKind::BoolLit;
      e.bool_value = toks_[pos_ - 1].text == "true";
      return e;
    }
    if (accept("null")) {
      e.kind = ExprKind::NullLit;
      return e;
    }
    if (accept("this")) {
      e.kind = ExprKind::This;
      return e;
    }
    if (accept("new")) {
      e.kind = ExprKind::New;
      e.name = ident();
      args(e);
      return e;
    }
    if (accept("(")) {
      Expr inner = expr();
      expect(")");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      e.name = ident();
      if (at("(")) {
        e.kind = ExprKind::Call;
        e.implicit_receiver = true;
        args(e);
      } else {
        e.kind = ExprKind::Name;
      }
      return e;
    }
    fail({"expression"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse_syntax(std::string_view source) {
  Parser p(tokenize(source));
  return p.program();
}

Program parse_program(std::string_view source) {
  Program prog = parse_syntax(source);
  resolve_program(prog);
  return prog;
}

}  // namespace cbc
