#include <algorithm>
#include <functional>
#include <set>

#include "cbc/cfg/method_cfg.hpp"
#include "cbc/errors.hpp"

namespace cbc {

const char* to_string(Polarity p) {
  switch (p) {
    case Polarity::True: return "true";
    case Polarity::False: return "false";
    case Polarity::Unconditional: return "unconditional";
  }
  return "?";
}

int relative_line(const ClassDef& cls, int absolute_line) { return absolute_line - cls.pos.line + 1; }

std::vector<CfgEdge> MethodCfg::edges() const {
  std::vector<CfgEdge> out;
  for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
    const CfgNode& node = nodes[n];
    if (node.is_branch()) {
      out.push_back({n, node.succ[0], Polarity::True});
      out.push_back({n, node.succ[1], Polarity::False});
    } else {
      for (int s : node.succ) out.push_back({n, s, Polarity::Unconditional});
    }
  }
  return out;
}

std::optional<int> MethodCfg::find(const std::string& label) const {
  for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
    if (nodes[n].label == label) return n;
  }
  return std::nullopt;
}

std::vector<int> MethodCfg::branching_nodes() const {
  std::vector<int> out;
  for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
    if (nodes[n].is_branch()) out.push_back(n);
  }
  return out;
}

namespace {

bool has_logical(const Expr& e) {
  if (e.kind == ExprKind::Binary && is_logical(e.binop)) return true;
  if (e.kind == ExprKind::Call || e.kind == ExprKind::New) return false;
  for (const auto& k : e.kids) {
    if (has_logical(k)) return true;
  }
  return false;
}

class Builder {
 public:
  Builder(const Program& prog, const MethodDef& m) : prog_(prog), cls_(prog.get_class(m.owner)), m_(m) {
    out_.class_name = m.owner;
    out_.method_name = m.name;
    out_.num_params = static_cast<int>(m.params.size());
    for (const auto& l : m.locals) out_.slot_types.push_back(l.type);
  }

  MethodCfg build() {
    int entry = new_node(NodeKind::Entry, 0);
    int exit = new_node(NodeKind::Exit, 0);
    (void)exit;
    cur_ = new_node(NodeKind::Block, rel(m_.pos.line));
    raw_[entry].node.succ = {cur_};
    block(m_.body);
    if (cur_ >= 0) jump(cur_, MethodCfg::kExit);
    cleanup();
    return std::move(out_);
  }

 private:
  struct Raw {
    CfgNode node;
    std::string forced;
    bool dead = false;
  };

  int rel(int line) const { return relative_line(cls_, line); }

  int new_node(NodeKind kind, int line, std::string forced = {}) {
    Raw r;
    r.node.kind = kind;
    r.node.line = line;
    r.forced = std::move(forced);
    raw_.push_back(std::move(r));
    return static_cast<int>(raw_.size()) - 1;
  }

  void jump(int from, int to) { raw_[from].node.succ = {to}; }

  bool reusable(int n) const {
    const Raw& r = raw_[n];
    return r.node.kind == NodeKind::Block && r.forced.empty() && r.node.instrs.empty() &&
           !r.node.is_call() && !r.node.is_branch();
  }

  int new_temp(const Type& t) {
    out_.slot_types.push_back(t);
    return static_cast<int>(out_.slot_types.size()) - 1;
  }

  void emit(Instr in) { raw_[cur_].node.instrs.push_back(std::move(in)); }

  void block(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (cur_ < 0) throw CfgError(m_.key() + ": unreachable statement at line " + std::to_string(s.pos.line));
      stmt(s);
    }
  }

  void stmt(const Stmt& s) {
    int line = rel(s.pos.line);
    switch (s.kind) {
      case StmtKind::Assign: {
        Expr v = value(s.exprs[0]);
        Instr in;
        in.line = line;
        in.value = std::move(v);
        if (s.binding == NameBinding::Local) {
          in.kind = InstrKind::Assign;
          in.slot = s.slot;
        } else {
          in.kind = InstrKind::StoreField;
          in.field = s.target;
          in.field_owner = s.owner_class;
          Expr self;
          self.kind = ExprKind::This;
          self.pos = s.pos;
          self.type = Type::ref(cls_.name);
          in.object = std::move(self);
        }
        emit(std::move(in));
        break;
      }
      case StmtKind::FieldAssign: {
        Expr obj = value(s.exprs[0]);
        Expr v = value(s.exprs[1]);
        Instr in;
        in.kind = InstrKind::StoreField;
        in.line = line;
        in.field = s.target;
        in.field_owner = s.owner_class;
        in.object = std::move(obj);
        in.value = std::move(v);
        emit(std::move(in));
        break;
      }
      case StmtKind::ExprStmt:
        call(s.exprs[0], false);
        break;
      case StmtKind::Return: {
        Instr in;
        in.kind = InstrKind::Return;
        in.line = line;
        if (!s.exprs.empty()) in.value = value(s.exprs[0]);
        emit(std::move(in));
        jump(cur_, MethodCfg::kExit);
        cur_ = -1;
        break;
      }
      case StmtKind::If: {
        int then_line = s.body.empty() ? line : rel(s.body.front().pos.line);
        int t = new_node(NodeKind::Block, then_line);
        int join = -1;
        int f;
        if (s.has_else) {
          int else_line = s.else_body.empty() ? line : rel(s.else_body.front().pos.line);
          f = new_node(NodeKind::Block, else_line);
        } else {
          join = new_node(NodeKind::Block, line);
          f = join;
        }
        cond(s.exprs[0], t, f);
        cur_ = t;
        block(s.body);
        int then_end = cur_;
        int else_end = -1;
        if (s.has_else) {
          cur_ = f;
          block(s.else_body);
          else_end = cur_;
        }
        if (join < 0 && (then_end >= 0 || else_end >= 0)) join = new_node(NodeKind::Block, line);
        if (then_end >= 0) jump(then_end, join);
        if (else_end >= 0) jump(else_end, join);
        cur_ = join;
        break;
      }
      case StmtKind::While: {
        int header = cur_;
        if (!reusable(cur_)) {
          header = new_node(NodeKind::Block, line);
          jump(cur_, header);
          cur_ = header;
        }
        int body_line = s.body.empty() ? line : rel(s.body.front().pos.line);
        int body = new_node(NodeKind::Block, body_line);
        int after = new_node(NodeKind::Block, line);
        cond(s.exprs[0], body, after);
        cur_ = body;
        block(s.body);
        if (cur_ >= 0) jump(cur_, header);
        cur_ = after;
        break;
      }
    }
  }

  // Branches on `e` to t/f, one atomic condition per node.
  void cond(const Expr& e, int t, int f) {
    if (e.kind == ExprKind::Binary && e.binop == BinOp::And) {
      int mid = new_node(NodeKind::Block, rel(e.kids[1].pos.line));
      cond(e.kids[0], mid, f);
      cur_ = mid;
      cond(e.kids[1], t, f);
      return;
    }
    if (e.kind == ExprKind::Binary && e.binop == BinOp::Or) {
      int mid = new_node(NodeKind::Block, rel(e.kids[1].pos.line));
      cond(e.kids[0], t, mid);
      cur_ = mid;
      cond(e.kids[1], t, f);
      return;
    }
    if (e.kind == ExprKind::Unary && e.unop == UnOp::Not) {
      cond(e.kids[0], f, t);
      return;
    }
    Expr atom = value(e);
    CfgNode& n = raw_[cur_].node;
    n.condition = std::move(atom);
    n.condition_line = rel(e.pos.line);
    n.succ = {t, f};
    cur_ = -1;
  }

  // Call-free, branch-free copy of `e`; calls are split out into nodes.
  Expr value(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Call:
      case ExprKind::New: {
        int slot = call(e, true);
        Expr tmp;
        tmp.kind = ExprKind::Name;
        tmp.pos = e.pos;
        tmp.name = "$t" + std::to_string(slot);
        tmp.binding = NameBinding::Local;
        tmp.slot = slot;
        tmp.type = e.type;
        return tmp;
      }
      case ExprKind::Binary:
        if (is_logical(e.binop)) return materialize(e);
        break;
      case ExprKind::Unary:
        if (e.unop == UnOp::Not && has_logical(e.kids[0])) return materialize(e);
        break;
      default:
        break;
    }
    Expr out = e;
    out.kids.clear();
    for (const auto& k : e.kids) out.kids.push_back(value(k));
    return out;
  }

  // Short-circuit operator in value position: branch into a bool temporary.
  Expr materialize(const Expr& e) {
    int slot = new_temp(Type::bool_type());
    int line = rel(e.pos.line);
    int t = new_node(NodeKind::Block, line);
    int f = new_node(NodeKind::Block, line);
    int join = new_node(NodeKind::Block, line);
    cond(e, t, f);
    for (auto [node, val] : {std::pair{t, true}, std::pair{f, false}}) {
      Expr lit;
      lit.kind = ExprKind::BoolLit;
      lit.pos = e.pos;
      lit.bool_value = val;
      lit.type = Type::bool_type();
      Instr in;
      in.kind = InstrKind::Assign;
      in.line = line;
      in.slot = slot;
      in.value = std::move(lit);
      raw_[node].node.instrs.push_back(std::move(in));
      jump(node, join);
    }
    cur_ = join;
    Expr tmp;
    tmp.kind = ExprKind::Name;
    tmp.pos = e.pos;
    tmp.name = "$t" + std::to_string(slot);
    tmp.binding = NameBinding::Local;
    tmp.slot = slot;
    tmp.type = Type::bool_type();
    return tmp;
  }

  int call(const Expr& e, bool want_result) {
    CallInfo info;
    info.line = rel(e.pos.line);
    if (e.kind == ExprKind::New) {
      info.is_new = true;
      info.static_class = e.name;
      info.method = "<init>";
      for (const auto& a : e.kids) info.args.push_back(value(a));
    } else {
      info.method = e.name;
      info.static_class = e.owner_class;
      const Expr* recv = e.receiver();
      info.on_this = recv == nullptr || recv->kind == ExprKind::This;
      if (recv) {
        info.receiver = value(*recv);
      } else {
        Expr self;
        self.kind = ExprKind::This;
        self.pos = e.pos;
        self.type = Type::ref(cls_.name);
        info.receiver = std::move(self);
      }
      for (std::size_t i = e.first_arg(); i < e.kids.size(); ++i) info.args.push_back(value(e.kids[i]));
    }
    if (want_result && e.type.base != BaseType::Void) info.dst_slot = new_temp(e.type);
    int slot = info.dst_slot;

    std::string tag = std::to_string(info.line);
    int c = cur_;
    if (!reusable(c)) {
      c = new_node(NodeKind::Block, info.line);
      jump(cur_, c);
    }
    bool split = info.on_this;
    raw_[c].node.kind = NodeKind::Call;
    raw_[c].node.line = info.line;
    if (split) raw_[c].forced = tag + "c";
    raw_[c].node.call = std::move(info);
    int next = split ? new_node(NodeKind::Return, 0, tag + "r") : new_node(NodeKind::Block, 0);
    if (split) raw_[next].node.line = std::stoi(tag);
    jump(c, next);
    cur_ = next;
    return slot;
  }

  std::vector<std::vector<int>> preds() const {
    std::vector<std::vector<int>> p(raw_.size());
    for (int n = 0; n < static_cast<int>(raw_.size()); ++n) {
      if (raw_[n].dead) continue;
      for (int s : raw_[n].node.succ) p[s].push_back(n);
    }
    return p;
  }

  void cleanup() {
    const int kEntry = MethodCfg::kEntry;
    const int kExit = MethodCfg::kExit;
    std::vector<bool> reach(raw_.size(), false);
    std::function<void(int)> mark = [&](int n) {
      if (reach[n]) return;
      reach[n] = true;
      for (int s : raw_[n].node.succ) mark(s);
    };
    mark(kEntry);
    for (int n = 0; n < static_cast<int>(raw_.size()); ++n) {
      if (reach[n] || n == kExit) continue;
      const CfgNode& node = raw_[n].node;
      if (!node.instrs.empty() || node.is_branch() || node.is_call()) {
        throw CfgError(m_.key() + ": unreachable code at line " + std::to_string(node.line));
      }
      raw_[n].dead = true;
    }

    // Drop empty pass-through blocks, unless that would leave a branch with
    // both edges into the same node.
    bool changed = true;
    while (changed) {
      changed = false;
      auto p = preds();
      for (int b = 2; b < static_cast<int>(raw_.size()); ++b) {
        if (raw_[b].dead || !reusable(b) || raw_[b].node.succ.size() != 1) continue;
        int t = raw_[b].node.succ[0];
        if (t == b) continue;
        bool parallel = false;
        for (int q : p[b]) {
          const CfgNode& pn = raw_[q].node;
          if (pn.is_branch() && (pn.succ[0] == t || pn.succ[1] == t)) parallel = true;
        }
        if (parallel) continue;
        for (int q : p[b]) {
          for (int& s : raw_[q].node.succ) {
            if (s == b) s = t;
          }
        }
        raw_[b].dead = true;
        changed = true;
        break;
      }
    }

    // Merge straight-line chains into maximal blocks.
    changed = true;
    while (changed) {
      changed = false;
      auto p = preds();
      for (int a = 2; a < static_cast<int>(raw_.size()); ++a) {
        Raw& ra = raw_[a];
        if (ra.dead || ra.node.is_call() || ra.node.is_branch() || ra.node.succ.size() != 1) continue;
        if (ra.node.kind != NodeKind::Block && ra.node.kind != NodeKind::Return) continue;
        int b = ra.node.succ[0];
        Raw& rb = raw_[b];
        if (b == a || b < 2 || rb.node.kind != NodeKind::Block || !rb.forced.empty() || rb.node.is_call()) continue;
        if (p[b].size() != 1) continue;
        if (ra.node.instrs.empty() && ra.forced.empty()) ra.node.line = rb.node.line;
        for (auto& in : rb.node.instrs) ra.node.instrs.push_back(std::move(in));
        ra.node.condition = std::move(rb.node.condition);
        ra.node.condition_line = rb.node.condition_line;
        ra.node.succ = rb.node.succ;
        rb.dead = true;
        changed = true;
      }
    }

    // Every live node must reach Exit.
    std::vector<bool> to_exit(raw_.size(), false);
    to_exit[kExit] = true;
    changed = true;
    while (changed) {
      changed = false;
      for (int n = 0; n < static_cast<int>(raw_.size()); ++n) {
        if (raw_[n].dead || to_exit[n]) continue;
        for (int s : raw_[n].node.succ) {
          if (to_exit[s]) {
            to_exit[n] = true;
            changed = true;
            break;
          }
        }
      }
    }
    for (int n = 0; n < static_cast<int>(raw_.size()); ++n) {
      if (!raw_[n].dead && !to_exit[n]) {
        throw CfgError(m_.key() + ": no path to exit from line " + std::to_string(raw_[n].node.line));
      }
    }

    std::vector<int> remap(raw_.size(), -1);
    for (int n = 0; n < static_cast<int>(raw_.size()); ++n) {
      if (!raw_[n].dead) {
        remap[n] = static_cast<int>(out_.nodes.size());
        out_.nodes.push_back(raw_[n].node);
      }
    }
    std::map<std::string, int> seen;
    for (int n = 0; n < static_cast<int>(raw_.size()); ++n) {
      if (raw_[n].dead) continue;
      CfgNode& node = out_.nodes[remap[n]];
      for (int& s : node.succ) s = remap[s];
      if (node.kind == NodeKind::Entry) {
        node.label = "Entry";
      } else if (node.kind == NodeKind::Exit) {
        node.label = "Exit";
      } else {
        if (!node.instrs.empty()) {
          node.line = node.instrs.front().line;
        } else if (node.is_branch()) {
          node.line = node.condition_line;
        }
        node.label = raw_[n].forced.empty() ? std::to_string(node.line) : raw_[n].forced;
      }
      int count = ++seen[node.label];
      if (count > 1) node.label += "#" + std::to_string(count);
    }
  }

  const Program& prog_;
  const ClassDef& cls_;
  const MethodDef& m_;
  MethodCfg out_;
  std::vector<Raw> raw_;
  int cur_ = -1;
};

}  // namespace

MethodCfg build_method_cfg(const Program& program, const MethodDef& method) {
  if (method.is_abstract) throw CfgError(method.key() + " is abstract");
  return Builder(program, method).build();
}

CompiledProgram::CompiledProgram(Program program)
    : program_(std::make_shared<const Program>(std::move(program))) {
  for (const auto& [name, cls] : program_->classes) {
    for (const auto& c : cls.constructors) {
      cfgs_[c.key()] = std::make_shared<const MethodCfg>(build_method_cfg(*program_, c));
    }
    for (const auto& m : cls.methods) {
      if (!m.is_abstract) cfgs_[m.key()] = std::make_shared<const MethodCfg>(build_method_cfg(*program_, m));
    }
  }
}

std::shared_ptr<const MethodCfg> CompiledProgram::cfg(const std::string& method_key) const {
  auto it = cfgs_.find(method_key);
  return it == cfgs_.end() ? nullptr : it->second;
}

}  // namespace cbc
