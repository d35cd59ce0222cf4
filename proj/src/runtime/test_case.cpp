#include "cbc/runtime/test_case.hpp"

#include <sstream>

#include "cbc/lang/resolve.hpp"

namespace cbc {

Statement Statement::construct(std::string cls, std::vector<Arg> args) {
  Statement s;
  s.kind = Kind::Construct;
  s.class_name = std::move(cls);
  s.args = std::move(args);
  return s;
}

Statement Statement::assign(Type type, Arg literal) {
  Statement s;
  s.kind = Kind::Assign;
  s.type = std::move(type);
  s.literal = literal;
  return s;
}

Statement Statement::invoke(int receiver, std::string method, std::vector<Arg> args) {
  Statement s;
  s.kind = Kind::Invoke;
  s.receiver = receiver;
  s.method = std::move(method);
  s.args = std::move(args);
  return s;
}

const MethodDef* invoked_method(const Program& program, const TestCase& t, int i) {
  const Statement& s = t.stmts[i];
  if (s.kind != Statement::Kind::Invoke || s.receiver < 0 || s.receiver >= i) return nullptr;
  Type recv = statement_type(program, t, s.receiver);
  if (!recv.is_ref() || !program.find_class(recv.class_name)) return nullptr;
  return find_dispatch(program, recv.class_name, s.method);
}

Type statement_type(const Program& program, const TestCase& t, int i) {
  const Statement& s = t.stmts[i];
  switch (s.kind) {
    case Statement::Kind::Construct: return Type::ref(s.class_name);
    case Statement::Kind::Assign: return s.type;
    case Statement::Kind::Invoke: {
      const MethodDef* m = invoked_method(program, t, i);
      return m ? m->return_type : Type::void_type();
    }
  }
  return Type::void_type();
}

namespace {

std::optional<std::string> check_arg(const Program& p, const TestCase& t, int i, const Arg& a, const Type& want) {
  switch (a.kind) {
    case Arg::Kind::Int:
      if (want.base != BaseType::Int) return "int literal where " + to_string(want) + " expected";
      break;
    case Arg::Kind::Bool:
      if (want.base != BaseType::Bool) return "bool literal where " + to_string(want) + " expected";
      break;
    case Arg::Kind::Null:
      if (!want.is_ref()) return "null where " + to_string(want) + " expected";
      break;
    case Arg::Kind::Ref: {
      if (a.ref < 0 || a.ref >= i) return "reference to statement " + std::to_string(a.ref) + " is not earlier";
      Type got = statement_type(p, t, a.ref);
      if (got.base == BaseType::Void) return "void value of statement " + std::to_string(a.ref) + " used";
      if (!assignable(p, want, got)) return to_string(got) + " where " + to_string(want) + " expected";
      break;
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_args(const Program& p, const TestCase& t, int i, const std::vector<Arg>& args,
                                      const std::vector<Param>& params) {
  if (args.size() != params.size()) {
    return std::to_string(args.size()) + " arguments for " + std::to_string(params.size()) + " parameters";
  }
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (auto err = check_arg(p, t, i, args[k], params[k].type)) return err;
  }
  return std::nullopt;
}

std::string arg_source(const Arg& a) {
  switch (a.kind) {
    case Arg::Kind::Int: return std::to_string(a.value);
    case Arg::Kind::Bool: return a.value ? "true" : "false";
    case Arg::Kind::Null: return "null";
    case Arg::Kind::Ref: return "v" + std::to_string(a.ref);
  }
  return "?";
}

std::string arg_list(const std::vector<Arg>& args) {
  std::string out = "(";
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (k) out += ", ";
    out += arg_source(args[k]);
  }
  return out + ")";
}

}  // namespace

std::optional<std::string> validate_test(const Program& p, const TestCase& t) {
  for (int i = 0; i < static_cast<int>(t.stmts.size()); ++i) {
    const Statement& s = t.stmts[i];
    std::optional<std::string> err;
    switch (s.kind) {
      case Statement::Kind::Construct: {
        const ClassDef* cls = p.find_class(s.class_name);
        if (!cls) {
          err = "unknown class '" + s.class_name + "'";
        } else if (const MethodDef* ctor = cls->ctor()) {
          if (ctor->visibility == Visibility::Private) {
            err = "private ctor of '" + s.class_name + "'";
          } else {
            err = check_args(p, t, i, s.args, ctor->params);
          }
        } else if (!s.args.empty()) {
          err = "'" + s.class_name + "' has no ctor taking arguments";
        }
        break;
      }
      case Statement::Kind::Assign:
        if (s.type.is_ref() && !p.find_class(s.type.class_name)) {
          err = "unknown class '" + s.type.class_name + "'";
        } else if (s.literal.kind == Arg::Kind::Ref) {
          err = "assignment of a non-literal";
        } else {
          err = check_arg(p, t, i, s.literal, s.type);
        }
        break;
      case Statement::Kind::Invoke: {
        if (s.receiver < 0 || s.receiver >= i) {
          err = "receiver is not an earlier statement";
          break;
        }
        Type recv = statement_type(p, t, s.receiver);
        if (!recv.is_ref()) {
          err = "receiver is not an object";
          break;
        }
        const MethodDef* m = find_dispatch(p, recv.class_name, s.method);
        if (!m || m->is_ctor) {
          err = "no method '" + s.method + "' on '" + recv.class_name + "'";
        } else if (m->visibility == Visibility::Private) {
          err = "method '" + m->key() + "' is private";
        } else {
          err = check_args(p, t, i, s.args, m->params);
        }
        break;
      }
    }
    if (err) return "statement " + std::to_string(i) + ": " + *err;
  }
  return std::nullopt;
}

std::string to_source(const Program& p, const TestCase& t) {
  std::ostringstream os;
  for (int i = 0; i < static_cast<int>(t.stmts.size()); ++i) {
    const Statement& s = t.stmts[i];
    std::string var = "v" + std::to_string(i);
    switch (s.kind) {
      case Statement::Kind::Construct:
        os << s.class_name << ' ' << var << " = new " << s.class_name << arg_list(s.args) << ";\n";
        break;
      case Statement::Kind::Assign:
        os << to_string(s.type) << ' ' << var << " = " << arg_source(s.literal) << ";\n";
        break;
      case Statement::Kind::Invoke: {
        Type rt = statement_type(p, t, i);
        if (rt.base != BaseType::Void) os << to_string(rt) << ' ' << var << " = ";
        os << 'v' << s.receiver << '.' << s.method << arg_list(s.args) << ";\n";
        break;
      }
    }
  }
  return os.str();
}

}  // namespace cbc
