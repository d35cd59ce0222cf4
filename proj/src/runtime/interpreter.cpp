#include "cbc/runtime/interpreter.hpp"

#include <limits>
#include <unordered_map>

#include "cbc/lang/resolve.hpp"

namespace cbc {

namespace {

std::int64_t clamp(__int128 v) {
  if (v < 0) return 0;
  if (v > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(v);
}

struct Value {
  enum class Tag : std::uint8_t { Int, Bool, Ref };
  Tag tag = Tag::Int;
  std::int64_t v = 0;  // Ref: object id, -1 for null

  static Value of_int(std::int64_t x) { return {Tag::Int, x}; }
  static Value of_bool(bool b) { return {Tag::Bool, b ? 1 : 0}; }
  static Value null() { return {Tag::Ref, -1}; }
};

Value default_value(const Type& t) {
  switch (t.base) {
    case BaseType::Bool: return Value::of_bool(false);
    case BaseType::Ref:
    case BaseType::Null: return Value::null();
    default: return Value::of_int(0);
  }
}

std::int64_t wrap(std::uint64_t x) { return static_cast<std::int64_t>(x); }

struct Object {
  std::string cls;
  std::vector<Value> fields;
};

struct Fault {
  std::string kind;
  std::string location;
};

struct OutOfBudget {};

class Interp {
 public:
  Interp(const CompiledProgram& prog, std::int64_t budget, Trace& trace)
      : prog_(prog), p_(prog.program()), budget_(budget), tr_(trace) {}

  void tick() {
    if (tr_.steps >= budget_) throw OutOfBudget{};
    ++tr_.steps;
  }

  Value construct(const std::string& cls, std::vector<Value> args, int parent, const std::string& site_method,
                  const std::string& site_label, const std::string& where) {
    if (!is_instantiable(p_, cls)) throw Fault{"abstract-instantiation", where};
    Object obj;
    obj.cls = cls;
    for (const auto& slot : field_layout(p_, cls)) obj.fields.push_back(default_value(slot.def->type));
    heap_.push_back(std::move(obj));
    Value ref{Value::Tag::Ref, static_cast<std::int64_t>(heap_.size()) - 1};
    if (const MethodDef* ctor = p_.get_class(cls).ctor()) {
      invoke(*prog_.cfg(ctor->key()), ref, std::move(args), parent, site_method, site_label, where);
    }
    return ref;
  }

  Value call_method(Value recv, const std::string& method, std::vector<Value> args, int parent,
                    const std::string& site_method, const std::string& site_label, const std::string& where) {
    if (recv.v < 0) throw Fault{"null-deref", where};
    const MethodDef* m = find_dispatch(p_, heap_[recv.v].cls, method);
    return invoke(*prog_.cfg(m->key()), recv, std::move(args), parent, site_method, site_label, where);
  }

  std::string describe(Value v) const {
    switch (v.tag) {
      case Value::Tag::Int: return std::to_string(v.v);
      case Value::Tag::Bool: return v.v ? "true" : "false";
      case Value::Tag::Ref: return v.v < 0 ? "null" : heap_[v.v].cls;
    }
    return "?";
  }

 private:
  struct Activation {
    const MethodCfg& cfg;
    Value self;
    std::vector<Value> locals;
    int frame;
  };

  // Closes the frame on normal return and on unwinding.
  struct FrameGuard {
    Interp& in;
    int id;
    ~FrameGuard() {
      in.tr_.frames[id].end = ++in.seq_;
      --in.depth_;
    }
  };

  Value invoke(const MethodCfg& cfg, Value self, std::vector<Value> args, int parent, const std::string& site_method,
               const std::string& site_label, const std::string& where) {
    if (depth_ >= kMaxCallDepth) throw Fault{"stack-overflow", where};
    int id = static_cast<int>(tr_.frames.size());
    tr_.frames.push_back({id, parent, cfg.key(), site_method, site_label, ++seq_, 0});
    ++depth_;
    FrameGuard guard{*this, id};

    Activation act{cfg, self, {}, id};
    act.locals.reserve(cfg.slot_types.size());
    for (const auto& t : cfg.slot_types) act.locals.push_back(default_value(t));
    for (std::size_t k = 0; k < args.size(); ++k) act.locals[k] = args[k];
    return run(act);
  }

  std::string location(const MethodCfg& cfg, const CfgNode& n) const { return cfg.key() + ":" + n.label; }

  Value run(Activation& act) {
    const MethodCfg& cfg = act.cfg;
    Value ret = Value::of_int(0);
    int node = cfg.nodes[MethodCfg::kEntry].succ.front();
    while (node != MethodCfg::kExit) {
      const CfgNode& n = cfg.nodes[node];
      for (const auto& in : n.instrs) {
        tick();
        tr_.visited.emplace(cfg.key(), in.line);
        switch (in.kind) {
          case InstrKind::Assign: act.locals[in.slot] = eval(*in.value, act, n); break;
          case InstrKind::StoreField: {
            Value obj = eval(*in.object, act, n);
            Value v = eval(*in.value, act, n);
            if (obj.v < 0) throw Fault{"null-deref", location(cfg, n)};
            heap_[obj.v].fields[field_index(in.field_owner, in.field)] = v;
            break;
          }
          case InstrKind::Return:
            if (in.value) ret = eval(*in.value, act, n);
            break;
        }
      }
      if (n.is_call()) {
        tick();
        const CallInfo& c = *n.call;
        tr_.visited.emplace(cfg.key(), c.line);
        std::vector<Value> args;
        args.reserve(c.args.size());
        Value recv = Value::null();
        if (!c.is_new) recv = eval(*c.receiver, act, n);
        for (const auto& a : c.args) args.push_back(eval(a, act, n));
        std::string where = location(cfg, n);
        Value result = c.is_new ? construct(c.static_class, std::move(args), act.frame, cfg.key(), n.label, where)
                                : call_method(recv, c.method, std::move(args), act.frame, cfg.key(), n.label, where);
        if (c.dst_slot >= 0) act.locals[c.dst_slot] = result;
        node = n.succ.front();
      } else if (n.is_branch()) {
        tick();
        tr_.visited.emplace(cfg.key(), n.condition_line);
        BranchDistance d = condition_distance(*n.condition, act, n);
        bool taken = d.dist_true == 0;
        tr_.events.push_back({++seq_, act.frame, cfg.key(), n.label, taken, d.dist_true, d.dist_false});
        node = n.succ[taken ? 0 : 1];
      } else {
        node = n.succ.front();
      }
    }
    return ret;
  }

  BranchDistance condition_distance(const Expr& c, Activation& act, const CfgNode& n) {
    if (c.kind == ExprKind::Binary && is_relational(c.binop)) {
      Value a = eval(c.kids[0], act, n);
      Value b = eval(c.kids[1], act, n);
      if (a.tag == Value::Tag::Int && b.tag == Value::Tag::Int) return branch_distance(c.binop, a.v, b.v);
      bool eq = a.v == b.v;
      return bool_distance(c.binop == BinOp::Eq ? eq : !eq);
    }
    return bool_distance(eval(c, act, n).v != 0);
  }

  Value eval(const Expr& e, Activation& act, const CfgNode& n) {
    switch (e.kind) {
      case ExprKind::IntLit: return Value::of_int(e.int_value);
      case ExprKind::BoolLit: return Value::of_bool(e.bool_value);
      case ExprKind::NullLit: return Value::null();
      case ExprKind::This: return act.self;
      case ExprKind::Name:
        if (e.binding == NameBinding::Local) return act.locals[e.slot];
        return heap_[act.self.v].fields[field_index(e.owner_class, e.name)];
      case ExprKind::Field: {
        Value obj = eval(e.kids[0], act, n);
        if (obj.v < 0) throw Fault{"null-deref", location(act.cfg, n)};
        return heap_[obj.v].fields[field_index(e.owner_class, e.name)];
      }
      case ExprKind::Unary: {
        Value x = eval(e.kids[0], act, n);
        if (e.unop == UnOp::Not) return Value::of_bool(x.v == 0);
        return Value::of_int(wrap(0 - static_cast<std::uint64_t>(x.v)));
      }
      case ExprKind::Binary: return binary(e, act, n);
      case ExprKind::Call:
      case ExprKind::New: break;
    }
    throw std::logic_error("call left in a lowered expression");
  }

  Value binary(const Expr& e, Activation& act, const CfgNode& n) {
    if (e.binop == BinOp::And || e.binop == BinOp::Or) {
      bool l = eval(e.kids[0], act, n).v != 0;
      if (e.binop == BinOp::And ? !l : l) return Value::of_bool(l);
      return Value::of_bool(eval(e.kids[1], act, n).v != 0);
    }
    Value a = eval(e.kids[0], act, n);
    Value b = eval(e.kids[1], act, n);
    auto ua = static_cast<std::uint64_t>(a.v), ub = static_cast<std::uint64_t>(b.v);
    switch (e.binop) {
      case BinOp::Add: return Value::of_int(wrap(ua + ub));
      case BinOp::Sub: return Value::of_int(wrap(ua - ub));
      case BinOp::Mul: return Value::of_int(wrap(ua * ub));
      case BinOp::Div:
        if (b.v == 0) throw Fault{"div-by-zero", location(act.cfg, n)};
        if (a.v == std::numeric_limits<std::int64_t>::min() && b.v == -1) return a;
        return Value::of_int(a.v / b.v);
      case BinOp::Lt: return Value::of_bool(a.v < b.v);
      case BinOp::Le: return Value::of_bool(a.v <= b.v);
      case BinOp::Gt: return Value::of_bool(a.v > b.v);
      case BinOp::Ge: return Value::of_bool(a.v >= b.v);
      case BinOp::Eq: return Value::of_bool(a.v == b.v);
      case BinOp::Ne: return Value::of_bool(a.v != b.v);
      default: break;
    }
    throw std::logic_error("unhandled operator");
  }

  int field_index(const std::string& owner, const std::string& field) {
    std::string key = owner + '.' + field;
    auto it = field_cache_.find(key);
    if (it != field_cache_.end()) return it->second;
    int index = find_field(p_, owner, field)->index;
    field_cache_.emplace(std::move(key), index);
    return index;
  }

  const CompiledProgram& prog_;
  const Program& p_;
  std::int64_t budget_;
  Trace& tr_;
  std::vector<Object> heap_;
  std::int64_t seq_ = 0;
  int depth_ = 0;
  std::unordered_map<std::string, int> field_cache_;
};

Value literal(const Arg& a, const std::vector<Value>& vars) {
  switch (a.kind) {
    case Arg::Kind::Int: return Value::of_int(a.value);
    case Arg::Kind::Bool: return Value::of_bool(a.value != 0);
    case Arg::Kind::Null: return Value::null();
    case Arg::Kind::Ref: return vars[a.ref];
  }
  return Value::null();
}

}  // namespace

BranchDistance branch_distance(BinOp op, std::int64_t a, std::int64_t b) {
  __int128 x = a, y = b;
  std::int64_t eq = a == b ? 1 : 0;
  std::int64_t diff = clamp(x > y ? x - y : y - x);
  switch (op) {
    case BinOp::Lt: return {clamp(x - y + 1), clamp(y - x)};
    case BinOp::Le: return {clamp(x - y), clamp(y - x + 1)};
    case BinOp::Gt: return {clamp(y - x + 1), clamp(x - y)};
    case BinOp::Ge: return {clamp(y - x), clamp(x - y + 1)};
    case BinOp::Eq: return {diff, eq};
    case BinOp::Ne: return {eq, diff};
    default: break;
  }
  throw std::invalid_argument("not a comparison operator");
}

BranchDistance bool_distance(bool value) { return value ? BranchDistance{0, 1} : BranchDistance{1, 0}; }

Trace execute_test(const CompiledProgram& prog, const TestCase& test, std::int64_t budget) {
  Trace t;
  Interp in(prog, budget, t);
  std::vector<Value> vars(test.stmts.size(), Value::null());
  for (int i = 0; i < static_cast<int>(test.stmts.size()); ++i) {
    const Statement& s = test.stmts[i];
    std::string where = "test:" + std::to_string(i);
    try {
      in.tick();
      std::vector<Value> args;
      for (const auto& a : s.args) args.push_back(literal(a, vars));
      switch (s.kind) {
        case Statement::Kind::Construct:
          vars[i] = in.construct(s.class_name, std::move(args), -1, "", "", where);
          t.outcomes.push_back({i, OutcomeKind::Value, in.describe(vars[i]), "", ""});
          break;
        case Statement::Kind::Assign:
          vars[i] = literal(s.literal, vars);
          break;
        case Statement::Kind::Invoke: {
          const MethodDef* m = invoked_method(prog.program(), test, i);
          vars[i] = in.call_method(vars[s.receiver], s.method, std::move(args), -1, "", "", where);
          if (m && m->return_type.base == BaseType::Void) {
            t.outcomes.push_back({i, OutcomeKind::Void, "", "", ""});
          } else {
            t.outcomes.push_back({i, OutcomeKind::Value, in.describe(vars[i]), "", ""});
          }
          break;
        }
      }
    } catch (const Fault& f) {
      t.outcomes.push_back({i, OutcomeKind::Error, "", f.kind, f.location});
      break;
    } catch (const OutOfBudget&) {
      t.outcomes.push_back({i, OutcomeKind::BudgetExhausted, "", "", ""});
      t.budget_exhausted = true;
      break;
    }
  }
  return t;
}

}  // namespace cbc
