#include "cbc/lang/resolve.hpp"

#include <algorithm>
#include <set>

#include "cbc/errors.hpp"

namespace cbc {

std::string to_string(const Type& t) {
  switch (t.base) {
    case BaseType::Int: return "int";
    case BaseType::Bool: return "bool";
    case BaseType::Ref: return t.class_name;
    case BaseType::Void: return "void";
    case BaseType::Null: return "null";
  }
  return "?";
}

std::string to_string(Visibility v) {
  switch (v) {
    case Visibility::Public: return "public";
    case Visibility::Protected: return "protected";
    case Visibility::Private: return "private";
  }
  return "?";
}

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

bool is_relational(BinOp op) {
  return op == BinOp::Lt || op == BinOp::Le || op == BinOp::Eq || op == BinOp::Ne ||
         op == BinOp::Gt || op == BinOp::Ge;
}

bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

const MethodDef* ClassDef::find_declared(const std::string& method) const {
  if (method == "<init>") return ctor();
  for (const auto& m : methods) {
    if (m.name == method) return &m;
  }
  return nullptr;
}

const ClassDef* Program::find_class(const std::string& name) const {
  auto it = classes.find(name);
  return it == classes.end() ? nullptr : &it->second;
}

const ClassDef& Program::get_class(const std::string& name) const {
  const ClassDef* c = find_class(name);
  if (!c) throw UnknownClassError(name);
  return *c;
}

std::vector<std::string> ancestry(const Program& program, const std::string& cls) {
  std::vector<std::string> out;
  const ClassDef* c = &program.get_class(cls);
  while (c) {
    out.push_back(c->name);
    if (!c->superclass) break;
    c = program.find_class(*c->superclass);
    if (out.size() > program.classes.size()) break;  // cyclic; rejected by the resolver
  }
  return out;
}

bool is_subclass_of(const Program& program, const std::string& sub, const std::string& super) {
  if (!program.find_class(sub)) return false;
  auto chain = ancestry(program, sub);
  return std::find(chain.begin(), chain.end(), super) != chain.end();
}

std::vector<std::string> subtree(const Program& program, const std::string& cls) {
  std::vector<std::string> out;
  for (const auto& [name, c] : program.classes) {
    if (is_subclass_of(program, name, cls)) out.push_back(name);
  }
  return out;
}

const MethodDef* find_dispatch(const Program& program, const std::string& cls,
                               const std::string& method) {
  if (method == "<init>") {
    const ClassDef* c = program.find_class(cls);
    return c ? c->ctor() : nullptr;
  }
  if (!program.find_class(cls)) return nullptr;
  for (const auto& name : ancestry(program, cls)) {
    if (const MethodDef* m = program.get_class(name).find_declared(method)) return m;
  }
  return nullptr;
}

const MethodDef& lookup_dispatch(const Program& program, const std::string& cls,
                                 const std::string& method) {
  program.get_class(cls);
  const MethodDef* m = find_dispatch(program, cls, method);
  if (!m) throw NoSuchMethodError(cls, method);
  return *m;
}

std::vector<const MethodDef*> visible_methods(const Program& program, const std::string& cls) {
  auto chain = ancestry(program, cls);
  std::vector<const MethodDef*> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    for (const auto& m : program.get_class(*it).methods) {
      auto slot = std::find_if(out.begin(), out.end(),
                               [&](const MethodDef* o) { return o->name == m.name; });
      if (slot != out.end()) {
        *slot = &m;
      } else {
        out.push_back(&m);
      }
    }
  }
  return out;
}

bool is_instantiable(const Program& program, const std::string& cls) {
  const ClassDef& c = program.get_class(cls);
  if (c.declared_abstract) return false;
  for (const MethodDef* m : visible_methods(program, cls)) {
    if (m->is_abstract) return false;
  }
  return true;
}

std::vector<FieldSlot> field_layout(const Program& program, const std::string& cls) {
  auto chain = ancestry(program, cls);
  std::vector<FieldSlot> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    for (const auto& f : program.get_class(*it).fields) {
      out.push_back({*it, &f, static_cast<int>(out.size())});
    }
  }
  return out;
}

std::optional<FieldSlot> find_field(const Program& program, const std::string& cls,
                                    const std::string& field) {
  for (auto& slot : field_layout(program, cls)) {
    if (slot.def->name == field) return slot;
  }
  return std::nullopt;
}

bool assignable(const Program& program, const Type& to, const Type& from) {
  if (to.base == BaseType::Ref) {
    if (from.base == BaseType::Null) return true;
    return from.base == BaseType::Ref && is_subclass_of(program, from.class_name, to.class_name);
  }
  return to.base == from.base && to.base != BaseType::Void && to.base != BaseType::Null;
}

namespace {

class Resolver {
 public:
  explicit Resolver(Program& p) : prog_(p) {}

  void run() {
    for (auto& [name, cls] : prog_.classes) check_hierarchy(cls);
    for (auto& [name, cls] : prog_.classes) check_members(cls);
    for (auto& [name, cls] : prog_.classes) {
      for (auto& m : cls.constructors) resolve_method(cls, m);
      for (auto& m : cls.methods) resolve_method(cls, m);
    }
  }

 private:
  void check_hierarchy(const ClassDef& cls) {
    std::set<std::string> seen{cls.name};
    const ClassDef* c = &cls;
    while (c->superclass) {
      const ClassDef* parent = prog_.find_class(*c->superclass);
      if (!parent) throw ResolveError(c->pos, "unknown superclass '" + *c->superclass + "'");
      if (!seen.insert(parent->name).second) {
        throw ResolveError(cls.pos, "cyclic inheritance involving '" + cls.name + "'");
      }
      c = parent;
    }
  }

  void check_type_exists(const Type& t, SourcePos pos) {
    if (t.is_ref() && !prog_.find_class(t.class_name)) {
      throw ResolveError(pos, "unknown class '" + t.class_name + "'");
    }
  }

  void check_members(const ClassDef& cls) {
    std::set<std::string> field_names;
    for (const auto& slot : field_layout(prog_, cls.name)) {
      if (!field_names.insert(slot.def->name).second) {
        throw ResolveError(slot.def->pos, "duplicate field '" + slot.def->name + "' in '" + cls.name + "'");
      }
      check_type_exists(slot.def->type, slot.def->pos);
    }
    if (cls.constructors.size() > 1) {
      throw ResolveError(cls.constructors[1].pos, "class '" + cls.name + "' declares more than one ctor");
    }
    std::set<std::string> method_names;
    for (const auto& m : cls.methods) {
      if (!method_names.insert(m.name).second) {
        throw ResolveError(m.pos, "duplicate method '" + m.name + "' in '" + cls.name + "'");
      }
      check_signature_types(m);
      if (cls.superclass) {
        if (const MethodDef* base = find_dispatch(prog_, *cls.superclass, m.name)) {
          bool same = base->return_type == m.return_type && base->params.size() == m.params.size();
          for (std::size_t i = 0; same && i < m.params.size(); ++i) {
            same = base->params[i].type == m.params[i].type;
          }
          if (!same) {
            throw ResolveError(m.pos, "override '" + m.key() + "' does not match the signature of '" +
                                          base->key() + "'");
          }
        }
      }
    }
    for (const auto& m : cls.constructors) check_signature_types(m);
  }

  void check_signature_types(const MethodDef& m) {
    std::set<std::string> names;
    for (const auto& p : m.params) {
      check_type_exists(p.type, m.pos);
      if (!names.insert(p.name).second) throw ResolveError(m.pos, "duplicate parameter '" + p.name + "'");
    }
    check_type_exists(m.return_type, m.pos);
  }

  // --- method bodies -------------------------------------------------------

  void resolve_method(const ClassDef& cls, MethodDef& m) {
    cls_ = &cls;
    method_ = &m;
    m.locals = m.params;
    for (auto& s : m.body) stmt(s);
    if (!m.is_abstract && m.return_type.base != BaseType::Void && !always_returns(m.body)) {
      throw ResolveError(m.pos, "not all paths of '" + m.key() + "' return a value");
    }
  }

  static bool always_returns(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (s.kind == StmtKind::Return) return true;
      if (s.kind == StmtKind::If && s.has_else && always_returns(s.body) && always_returns(s.else_body)) {
        return true;
      }
    }
    return false;
  }

  int find_local(const std::string& name) const {
    for (std::size_t i = 0; i < method_->locals.size(); ++i) {
      if (method_->locals[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }

  void require(const Type& want, const Expr& e, const char* what) {
    if (!assignable(prog_, want, e.type)) {
      throw ResolveError(e.pos, std::string(what) + ": expected " + to_string(want) + ", found " +
                                    to_string(e.type));
    }
  }

  FieldSlot field_access(const std::string& cls, const std::string& field, SourcePos pos) {
    auto slot = find_field(prog_, cls, field);
    if (!slot) throw ResolveError(pos, "unknown field '" + field + "' on '" + cls + "'");
    if (slot->def->visibility == Visibility::Private && slot->owner != cls_->name) {
      throw ResolveError(pos, "field '" + slot->owner + "." + field + "' is private");
    }
    return *slot;
  }

  void stmt(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign: {
        Expr& value = s.exprs.front();
        expr(value);
        if (value.type.base == BaseType::Void) throw ResolveError(value.pos, "void value used");
        int local = find_local(s.target);
        if (local >= 0) {
          s.binding = NameBinding::Local;
          s.slot = local;
          require(method_->locals[local].type, value, "assignment");
          return;
        }
        if (auto slot = find_field(prog_, cls_->name, s.target)) {
          field_access(cls_->name, s.target, s.pos);
          s.binding = NameBinding::Field;
          s.owner_class = slot->owner;
          require(slot->def->type, value, "assignment");
          return;
        }
        if (value.type.base == BaseType::Null) {
          throw ResolveError(s.pos, "cannot infer the type of '" + s.target + "' from null");
        }
        s.binding = NameBinding::Local;
        s.slot = static_cast<int>(method_->locals.size());
        method_->locals.push_back({s.target, value.type});
        return;
      }
      case StmtKind::FieldAssign: {
        Expr& obj = s.exprs[0];
        expr(obj);
        if (!obj.type.is_ref()) throw ResolveError(obj.pos, "field store on a non-object value");
        FieldSlot slot = field_access(obj.type.class_name, s.target, s.pos);
        s.binding = NameBinding::Field;
        s.owner_class = slot.owner;
        expr(s.exprs[1]);
        require(slot.def->type, s.exprs[1], "field store");
        return;
      }
      case StmtKind::If:
      case StmtKind::While: {
        expr(s.exprs.front());
        require(Type::bool_type(), s.exprs.front(), "condition");
        for (auto& b : s.body) stmt(b);
        for (auto& b : s.else_body) stmt(b);
        return;
      }
      case StmtKind::Return: {
        if (method_->is_ctor || method_->return_type.base == BaseType::Void) {
          if (!s.exprs.empty()) throw ResolveError(s.pos, "'" + method_->key() + "' returns no value");
          return;
        }
        if (s.exprs.empty()) throw ResolveError(s.pos, "missing return value in '" + method_->key() + "'");
        expr(s.exprs.front());
        require(method_->return_type, s.exprs.front(), "return");
        return;
      }
      case StmtKind::ExprStmt:
        expr(s.exprs.front(), /*allow_void=*/true);
        return;
    }
  }

  void check_args(const MethodDef& callee, Expr& e, std::size_t first) {
    std::size_t n = e.kids.size() - first;
    if (n != callee.params.size()) {
      throw ResolveError(e.pos, "'" + callee.key() + "' takes " + std::to_string(callee.params.size()) +
                                    " argument(s), " + std::to_string(n) + " given");
    }
    for (std::size_t i = 0; i < n; ++i) {
      Expr& a = e.kids[first + i];
      expr(a);
      require(callee.params[i].type, a, "argument");
    }
  }

  void expr(Expr& e, bool allow_void = false) {
    switch (e.kind) {
      case ExprKind::IntLit: e.type = Type::int_type(); break;
      case ExprKind::BoolLit: e.type = Type::bool_type(); break;
      case ExprKind::NullLit: e.type = Type::null_type(); break;
      case ExprKind::This: e.type = Type::ref(cls_->name); break;
      case ExprKind::Name: {
        int local = find_local(e.name);
        if (local >= 0) {
          e.binding = NameBinding::Local;
          e.slot = local;
          e.type = method_->locals[local].type;
          break;
        }
        if (find_field(prog_, cls_->name, e.name)) {
          FieldSlot slot = field_access(cls_->name, e.name, e.pos);
          e.binding = NameBinding::Field;
          e.owner_class = slot.owner;
          e.type = slot.def->type;
          break;
        }
        throw ResolveError(e.pos, "unknown name '" + e.name + "'");
      }
      case ExprKind::Field: {
        Expr& obj = e.kids.front();
        expr(obj);
        if (!obj.type.is_ref()) throw ResolveError(e.pos, "field access on a non-object value");
        FieldSlot slot = field_access(obj.type.class_name, e.name, e.pos);
        e.binding = NameBinding::Field;
        e.owner_class = slot.owner;
        e.type = slot.def->type;
        break;
      }
      case ExprKind::Call: {
        std::string recv_cls = cls_->name;
        if (!e.implicit_receiver) {
          Expr& recv = e.kids.front();
          expr(recv);
          if (!recv.type.is_ref()) throw ResolveError(e.pos, "method call on a non-object value");
          recv_cls = recv.type.class_name;
        }
        const MethodDef* callee = find_dispatch(prog_, recv_cls, e.name);
        if (!callee) throw ResolveError(e.pos, "unknown method '" + e.name + "' on '" + recv_cls + "'");
        if (callee->visibility == Visibility::Private && callee->owner != cls_->name) {
          throw ResolveError(e.pos, "method '" + callee->key() + "' is private");
        }
        e.owner_class = recv_cls;
        check_args(*callee, e, e.first_arg());
        e.type = callee->return_type;
        break;
      }
      case ExprKind::New: {
        const ClassDef* target = prog_.find_class(e.name);
        if (!target) throw ResolveError(e.pos, "unknown class '" + e.name + "'");
        if (const MethodDef* ctor = target->ctor()) {
          check_args(*ctor, e, 0);
        } else if (!e.kids.empty()) {
          throw ResolveError(e.pos, "'" + e.name + "' has no ctor taking arguments");
        }
        e.owner_class = e.name;
        e.type = Type::ref(e.name);
        break;
      }
      case ExprKind::Unary: {
        Expr& x = e.kids.front();
        expr(x);
        e.type = e.unop == UnOp::Neg ? Type::int_type() : Type::bool_type();
        require(e.type, x, e.unop == UnOp::Neg ? "operand of '-'" : "operand of '!'");
        break;
      }
      case ExprKind::Binary: {
        Expr& l = e.kids[0];
        Expr& r = e.kids[1];
        expr(l);
        expr(r);
        switch (e.binop) {
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
          case BinOp::Div:
            require(Type::int_type(), l, "arithmetic operand");
            require(Type::int_type(), r, "arithmetic operand");
            e.type = Type::int_type();
            break;
          case BinOp::Lt:
          case BinOp::Le:
          case BinOp::Gt:
          case BinOp::Ge:
            require(Type::int_type(), l, "comparison operand");
            require(Type::int_type(), r, "comparison operand");
            e.type = Type::bool_type();
            break;
          case BinOp::Eq:
          case BinOp::Ne: {
            auto refish = [](const Type& t) { return t.is_ref() || t.base == BaseType::Null; };
            bool ok = (refish(l.type) && refish(r.type)) ||
                      (l.type.base == r.type.base &&
                       (l.type.base == BaseType::Int || l.type.base == BaseType::Bool));
            if (!ok) {
              throw ResolveError(e.pos, "cannot compare " + to_string(l.type) + " with " + to_string(r.type));
            }
            e.type = Type::bool_type();
            break;
          }
          case BinOp::And:
          case BinOp::Or:
            require(Type::bool_type(), l, "logical operand");
            require(Type::bool_type(), r, "logical operand");
            e.type = Type::bool_type();
            break;
        }
        break;
      }
    }
    if (!allow_void && e.type.base == BaseType::Void) throw ResolveError(e.pos, "void value used");
  }

  Program& prog_;
  const ClassDef* cls_ = nullptr;
  MethodDef* method_ = nullptr;
};

}  // namespace

void resolve_program(Program& program) { Resolver(program).run(); }

}  // namespace cbc
