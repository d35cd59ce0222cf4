#include <algorithm>
#include <optional>

#include "cbc/errors.hpp"
#include "cbc/lang/parser.hpp"
#include "cbc/mutation/mutation.hpp"

namespace cbc {

const std::vector<std::string>& mutation_operators() {
  static const std::vector<std::string> ops = {
      "NegateConditional",     "ConditionalsBoundary",   "Math",           "InlineConstant",
      "ReturnVals",            "PrimitiveReturns",       "BooleanTrueReturnVals", "BooleanFalseReturnVals",
      "NullReturnVals",        "VoidMethodCall",         "NonVoidMethodCall",     "ConstructorCall"};
  return ops;
}

std::string operator_family(const std::string& op) {
  if (op == "ReturnVals" || op == "PrimitiveReturns" || op == "BooleanTrueReturnVals" ||
      op == "BooleanFalseReturnVals" || op == "NullReturnVals") {
    return "RetStaRep";
  }
  if (op == "VoidMethodCall" || op == "NonVoidMethodCall" || op == "ConstructorCall") return "FunCalDel";
  return "Standard";
}

namespace {

struct Site {
  std::string op;
  std::string method;
  int line = 0;
  std::string description;
};

BinOp negated(BinOp op) {
  switch (op) {
    case BinOp::Lt: return BinOp::Ge;
    case BinOp::Ge: return BinOp::Lt;
    case BinOp::Le: return BinOp::Gt;
    case BinOp::Gt: return BinOp::Le;
    case BinOp::Eq: return BinOp::Ne;
    case BinOp::Ne: return BinOp::Eq;
    default: return op;
  }
}

std::optional<BinOp> boundary(BinOp op) {
  switch (op) {
    case BinOp::Lt: return BinOp::Le;
    case BinOp::Le: return BinOp::Lt;
    case BinOp::Gt: return BinOp::Ge;
    case BinOp::Ge: return BinOp::Gt;
    default: return std::nullopt;
  }
}

std::optional<BinOp> math(BinOp op) {
  switch (op) {
    case BinOp::Add: return BinOp::Sub;
    case BinOp::Sub: return BinOp::Add;
    case BinOp::Mul: return BinOp::Div;
    case BinOp::Div: return BinOp::Mul;
    default: return std::nullopt;
  }
}

Expr literal_of(const Type& t, const SourcePos& pos) {
  Expr e;
  e.pos = pos;
  switch (t.base) {
    case BaseType::Int: e.kind = ExprKind::IntLit; e.type = Type::int_type(); break;
    case BaseType::Bool: e.kind = ExprKind::BoolLit; e.type = Type::bool_type(); break;
    default: e.kind = ExprKind::NullLit; e.type = Type::null_type(); break;
  }
  return e;
}

std::string default_source(const Type& t) {
  if (t.base == BaseType::Int) return "0";
  if (t.base == BaseType::Bool) return "false";
  return "null";
}

Expr wrap(UnOp op, Expr inner, BaseType result) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.unop = op;
  e.pos = inner.pos;
  e.type = result == BaseType::Bool ? Type::bool_type() : Type::int_type();
  e.kids.push_back(std::move(inner));
  return e;
}

// Enumerates sites in a fixed order. With a target it applies the target-th
// site to the (copied) program it walks instead of recording.
class Walker {
 public:
  Walker(const ClassDef& cls, const std::set<std::string>& ops, int target = -1)
      : cls_(cls), ops_(ops), target_(target) {}

  void walk(ClassDef& cls) {
    for (auto& m : cls.constructors) method(m);
    for (auto& m : cls.methods) method(m);
  }

  std::vector<Site> sites;

 private:
  void method(MethodDef& m) {
    if (m.is_abstract) return;
    method_ = m.key();
    ret_ = m.return_type;
    body(m.body);
  }

  int rel(const SourcePos& p) const { return relative_line(cls_, p.line); }

  // True when this site is the one to apply now.
  bool offer(const std::string& op, int line, std::string desc) {
    if (!ops_.empty() && !ops_.count(op)) return false;
    int idx = counter_++;
    if (target_ < 0) {
      sites.push_back({op, method_, line, std::move(desc)});
      return false;
    }
    return idx == target_;
  }

  void body(std::vector<Stmt>& stmts) {
    for (std::size_t i = 0; i < stmts.size();) {
      if (stmt(stmts[i])) {
        stmts.erase(stmts.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }

  // Returns true when the statement is to be removed.
  bool stmt(Stmt& s) {
    int line = rel(s.pos);
    switch (s.kind) {
      case StmtKind::Assign:
      case StmtKind::FieldAssign:
        for (auto& e : s.exprs) value(e, line);
        return false;
      case StmtKind::ExprStmt: {
        Expr& e = s.exprs.front();
        int at = rel(e.pos);
        if (e.kind == ExprKind::New) {
          if (offer("ConstructorCall", at, "delete new " + e.name + "(...)")) return true;
        } else if (e.type.base == BaseType::Void) {
          if (offer("VoidMethodCall", at, "delete call " + e.name + "(...)")) return true;
        } else if (offer("NonVoidMethodCall", at, "delete call " + e.name + "(...) with unused result")) {
          return true;
        }
        for (auto& k : e.kids) value(k, at);
        return false;
      }
      case StmtKind::Return:
        if (!s.exprs.empty()) ret(s.exprs.front(), line);
        return false;
      case StmtKind::If:
      case StmtKind::While:
        cond(s.exprs.front());
        body(s.body);
        body(s.else_body);
        return false;
    }
    return false;
  }

  void ret(Expr& e, int line) {
    bool lit = e.kind == ExprKind::IntLit || e.kind == ExprKind::BoolLit || e.kind == ExprKind::NullLit;
    switch (ret_.base) {
      case BaseType::Int:
        if (!lit && offer("ReturnVals", line, "return x -> return x + 1")) {
          Expr one = literal_of(Type::int_type(), e.pos);
          one.int_value = 1;
          Expr sum;
          sum.kind = ExprKind::Binary;
          sum.binop = BinOp::Add;
          sum.pos = e.pos;
          sum.type = Type::int_type();
          sum.kids.push_back(std::move(e));
          sum.kids.push_back(std::move(one));
          e = std::move(sum);
          return;
        }
        if (!(e.kind == ExprKind::IntLit && e.int_value == 0) && offer("PrimitiveReturns", line, "return x -> return 0")) {
          e = literal_of(Type::int_type(), e.pos);
          return;
        }
        break;
      case BaseType::Bool:
        if (!lit && offer("ReturnVals", line, "return x -> return !x")) {
          e = wrap(UnOp::Not, std::move(e), BaseType::Bool);
          return;
        }
        if (!(e.kind == ExprKind::BoolLit && e.bool_value) && offer("BooleanTrueReturnVals", line, "return x -> return true")) {
          e = literal_of(Type::bool_type(), e.pos);
          e.bool_value = true;
          return;
        }
        if (!(e.kind == ExprKind::BoolLit && !e.bool_value) &&
            offer("BooleanFalseReturnVals", line, "return x -> return false")) {
          e = literal_of(Type::bool_type(), e.pos);
          return;
        }
        break;
      case BaseType::Ref:
        if (e.kind != ExprKind::NullLit && offer("NullReturnVals", line, "return x -> return null")) {
          e = literal_of(Type::null_type(), e.pos);
          return;
        }
        break;
      default: break;
    }
    value(e, line);
  }

  // Branch condition: logical structure is kept, atoms are negated.
  void cond(Expr& e) {
    if (e.kind == ExprKind::Binary && is_logical(e.binop)) {
      for (auto& k : e.kids) cond(k);
      return;
    }
    int line = rel(e.pos);
    if (e.kind == ExprKind::Binary && is_relational(e.binop)) {
      value(e, line);
      return;
    }
    if (e.kind == ExprKind::Unary && e.unop == UnOp::Not) {
      if (offer("NegateConditional", line, "!c -> c")) {
        Expr inner = std::move(e.kids.front());
        e = std::move(inner);
        return;
      }
    } else if (offer("NegateConditional", line, "c -> !c")) {
      e = wrap(UnOp::Not, std::move(e), BaseType::Bool);
      return;
    }
    value(e, line);
  }

  void value(Expr& e, int line) {
    switch (e.kind) {
      case ExprKind::IntLit: {
        std::int64_t to = e.int_value == 1 ? 0 : static_cast<std::int64_t>(static_cast<std::uint64_t>(e.int_value) + 1);
        if (offer("InlineConstant", line, std::to_string(e.int_value) + " -> " + std::to_string(to))) e.int_value = to;
        return;
      }
      case ExprKind::BoolLit:
        if (offer("InlineConstant", line, e.bool_value ? "true -> false" : "false -> true")) e.bool_value = !e.bool_value;
        return;
      case ExprKind::Binary: {
        std::string sym = to_string(e.binop);
        if (is_relational(e.binop)) {
          BinOp n = negated(e.binop);
          if (offer("NegateConditional", line, sym + " -> " + to_string(n))) {
            e.binop = n;
            return;
          }
          if (auto b = boundary(e.binop); b && offer("ConditionalsBoundary", line, sym + " -> " + to_string(*b))) {
            e.binop = *b;
            return;
          }
        } else if (auto m = math(e.binop); m && offer("Math", line, sym + " -> " + to_string(*m))) {
          e.binop = *m;
          return;
        }
        break;
      }
      case ExprKind::Call:
        if (offer("NonVoidMethodCall", rel(e.pos), "call " + e.name + "(...) -> " + default_source(e.type))) {
          e = literal_of(e.type, e.pos);
          return;
        }
        line = rel(e.pos);
        break;
      case ExprKind::New:
        if (offer("ConstructorCall", rel(e.pos), "new " + e.name + "(...) -> null")) {
          e = literal_of(Type::null_type(), e.pos);
          return;
        }
        line = rel(e.pos);
        break;
      default: break;
    }
    for (auto& k : e.kids) value(k, line);
  }

  const ClassDef& cls_;
  const std::set<std::string>& ops_;
  int target_;
  int counter_ = 0;
  std::string method_;
  Type ret_;
};

std::string site_label(const CompiledProgram& prog, const std::string& method, int line) {
  auto cfg = prog.cfg(method);
  if (!cfg) return std::to_string(line);
  for (const auto& n : cfg->nodes) {
    if (n.kind == NodeKind::Entry || n.kind == NodeKind::Exit) continue;
    bool hit = n.line == line || (n.condition && n.condition_line == line) || (n.call && n.call->line == line);
    for (const auto& in : n.instrs) hit |= in.line == line;
    if (hit) return n.label;
  }
  return std::to_string(line);
}

}  // namespace

std::vector<Mutant> generate_mutants(const CompiledProgram& prog, const std::string& target_class,
                                     const std::set<std::string>& operators) {
  const Program& program = prog.program();
  const ClassDef* cls = program.find_class(target_class);
  if (!cls) throw UnknownClassError(target_class);
  for (const auto& op : operators) {
    const auto& all = mutation_operators();
    if (std::find(all.begin(), all.end(), op) == all.end()) throw Error("unknown mutation operator '" + op + "'");
  }
  Program scratch = program;
  Walker collect(*cls, operators);
  collect.walk(scratch.classes.at(target_class));

  std::vector<Mutant> out;
  for (int i = 0; i < static_cast<int>(collect.sites.size()); ++i) {
    const Site& s = collect.sites[i];
    Program mutated = program;
    Walker apply(*cls, operators, i);
    apply.walk(mutated.classes.at(target_class));
    std::shared_ptr<const CompiledProgram> compiled;
    try {
      // The mutant must survive a print/parse round trip as well as CFG
      // construction; otherwise it is discarded.
      parse_program(print_program(mutated));
      compiled = std::make_shared<const CompiledProgram>(std::move(mutated));
    } catch (const Error&) {
      continue;
    }
    Mutant m;
    m.id = static_cast<int>(out.size());
    m.op = s.op;
    m.method = s.method;
    m.line = s.line;
    m.label = site_label(prog, s.method, s.line);
    m.description = s.description;
    m.program = std::move(compiled);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace cbc
