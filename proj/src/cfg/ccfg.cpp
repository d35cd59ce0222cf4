#include "cbc/cfg/ccfg.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "cbc/errors.hpp"
#include "cbc/lang/resolve.hpp"

namespace cbc {

const char* to_string(CcfgRole r) {
  switch (r) {
    case CcfgRole::Plain: return "plain";
    case CcfgRole::SuperclassOfPair: return "superclass-of-pair";
    case CcfgRole::SubclassOfPair: return "subclass-of-pair";
  }
  return "?";
}

const CfgNode& Ccfg::node(int id) const { return method_of(id).nodes[local_of(id)]; }

int Ccfg::method_index(const std::string& key) const {
  for (int i = 0; i < static_cast<int>(methods.size()); ++i) {
    if (methods[i]->key() == key) return i;
  }
  return -1;
}

std::optional<int> Ccfg::find(const std::string& method_key, const std::string& label) const {
  int m = method_index(method_key);
  if (m < 0) return std::nullopt;
  auto local = methods[m]->find(label);
  if (!local) return std::nullopt;
  return id(m, *local);
}

std::optional<std::string> Ccfg::linked_callee(int node_id) const {
  for (const auto& l : links) {
    if (l.from == node_id) return method_of(l.to).key();
  }
  return std::nullopt;
}

void Ccfg::add_method(std::shared_ptr<const MethodCfg> m) {
  int index = static_cast<int>(methods.size());
  offsets_.push_back(size());
  for (std::size_t i = 0; i < m->nodes.size(); ++i) method_of_node_.push_back(index);
  methods.push_back(std::move(m));
}

Digraph Ccfg::digraph() const {
  Digraph g;
  g.succ.resize(static_cast<std::size_t>(size()) + 2);
  g.entry = size();
  g.exit = size() + 1;
  std::set<int> linked;
  for (const auto& l : links) {
    if (node(l.from).is_call()) linked.insert(l.from);
  }
  for (int m = 0; m < static_cast<int>(methods.size()); ++m) {
    const MethodCfg& cfg = *methods[m];
    for (int n = 0; n < static_cast<int>(cfg.nodes.size()); ++n) {
      int gid = id(m, n);
      if (linked.count(gid)) continue;
      for (int s : cfg.nodes[n].succ) g.succ[gid].push_back(id(m, s));
    }
    g.succ[g.entry].push_back(id(m, MethodCfg::kEntry));
    g.succ[id(m, MethodCfg::kExit)].push_back(g.exit);
  }
  for (const auto& l : links) g.succ[l.from].push_back(l.to);
  return g;
}

std::vector<bool> Ccfg::branch_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(size()) + 2, false);
  for (int n = 0; n < size(); ++n) mask[n] = node(n).is_branch();
  return mask;
}

std::string Ccfg::to_dot() const {
  std::ostringstream os;
  os << "digraph \"" << owner << "\" {\n";
  for (int m = 0; m < static_cast<int>(methods.size()); ++m) {
    const MethodCfg& cfg = *methods[m];
    os << "  subgraph \"cluster_" << cfg.key() << "\" {\n    label=\"" << cfg.key() << "\";\n";
    for (int n = 0; n < static_cast<int>(cfg.nodes.size()); ++n) {
      const CfgNode& node = cfg.nodes[n];
      os << "    n" << id(m, n) << " [label=\"" << node.label << "\"";
      if (node.is_branch()) os << ", shape=diamond";
      os << "];\n";
    }
    os << "  }\n";
  }
  Digraph g = digraph();
  for (int n = 0; n < size(); ++n) {
    const CfgNode& node = this->node(n);
    for (std::size_t k = 0; k < g.succ[n].size(); ++k) {
      int t = g.succ[n][k];
      if (t >= size()) continue;
      os << "  n" << n << " -> n" << t;
      if (node.is_branch()) {
        os << " [label=\"" << (k == 0 ? "T" : "F") << "\"]";
      } else if (method_index_of(t) != method_index_of(n)) {
        os << " [style=dashed]";
      }
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

Ccfg build_ccfg(const CompiledProgram& prog, const std::string& cls, CcfgRole role,
                const std::optional<std::string>& paired) {
  const Program& p = prog.program();
  const ClassDef& def = p.get_class(cls);
  if (role != CcfgRole::Plain) {
    if (!paired) throw Error(std::string(to_string(role)) + " graph needs a paired class");
    p.get_class(*paired);
    bool ok = role == CcfgRole::SuperclassOfPair ? (*paired != cls && is_subclass_of(p, *paired, cls))
                                                 : (*paired != cls && is_subclass_of(p, cls, *paired));
    if (!ok) throw Error("'" + cls + "' and '" + *paired + "' do not form a " + to_string(role) + " pair");
  }

  Ccfg g;
  g.owner = cls;
  g.role = role;
  g.paired = paired;
  if (const MethodDef* c = def.ctor()) g.add_method(prog.cfg(c->key()));
  for (const MethodDef* m : visible_methods(p, cls)) {
    if (m->is_abstract) continue;
    bool include = true;
    if (role == CcfgRole::SuperclassOfPair) include = find_dispatch(p, *paired, m->name) == m;
    if (role == CcfgRole::SubclassOfPair) include = m->owner == cls;
    if (include) g.add_method(prog.cfg(m->key()));
  }

  for (int m = 0; m < static_cast<int>(g.methods.size()); ++m) {
    const MethodCfg& cfg = *g.methods[m];
    for (int n = 0; n < static_cast<int>(cfg.nodes.size()); ++n) {
      const CfgNode& node = cfg.nodes[n];
      if (!node.is_call() || !node.call->on_this) continue;
      const MethodDef* target = find_dispatch(p, cls, node.call->method);
      if (!target) continue;
      int callee = g.method_index(target->key());
      if (callee < 0) continue;
      int ret = node.succ.front();
      g.links.push_back({g.id(m, n), g.id(callee, MethodCfg::kEntry)});
      g.links.push_back({g.id(callee, MethodCfg::kExit), g.id(m, ret)});
    }
  }
  return g;
}

std::vector<CallSite> find_call_sites(const CompiledProgram& prog, const Ccfg& caller,
                                      const std::string& callee_class) {
  const Program& p = prog.program();
  p.get_class(callee_class);
  std::vector<CallSite> out;
  for (int n = 0; n < caller.size(); ++n) {
    const CfgNode& node = caller.node(n);
    if (!node.is_call()) continue;
    const CallInfo& call = *node.call;
    std::vector<std::string> callees;
    switch (caller.role) {
      case CcfgRole::Plain:
        if (call.is_new) {
          const ClassDef& target = p.get_class(call.static_class);
          if (call.static_class == callee_class && target.ctor()) callees.push_back(target.ctor()->key());
        } else if (is_subclass_of(p, call.static_class, callee_class) ||
                   is_subclass_of(p, callee_class, call.static_class)) {
          std::set<std::string> keys;
          for (const auto& u : subtree(p, call.static_class)) {
            if (!is_subclass_of(p, u, callee_class)) continue;
            const MethodDef* m = find_dispatch(p, u, call.method);
            if (m && !m->is_abstract) keys.insert(m->key());
          }
          callees.assign(keys.begin(), keys.end());
        }
        break;
      case CcfgRole::SuperclassOfPair:
        if (call.on_this) {
          const MethodDef* sub = find_dispatch(p, callee_class, call.method);
          if (sub && sub != find_dispatch(p, caller.owner, call.method) && !sub->is_abstract) {
            callees.push_back(sub->key());
          }
        }
        break;
      case CcfgRole::SubclassOfPair:
        if (call.on_this) {
          const MethodDef* m = find_dispatch(p, caller.owner, call.method);
          if (m && m->owner != caller.owner && !m->is_abstract) callees.push_back(m->key());
        }
        break;
    }
    if (callees.empty()) continue;
    CallSite s;
    s.caller_method = caller.method_of(n).key();
    s.label = node.label;
    s.line = node.line;
    s.node = n;
    s.callees = std::move(callees);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [&](const CallSite& a, const CallSite& b) {
    const std::string& ma = caller.method_of(a.node).method_name;
    const std::string& mb = caller.method_of(b.node).method_name;
    return std::tie(ma, a.line, a.label) < std::tie(mb, b.line, b.label);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

}  // namespace cbc
