#include "cbc/flow/coupling.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "cbc/lang/resolve.hpp"

namespace cbc {

std::string BranchEdge::describe(const std::string& prefix) const {
  return "<" + prefix + from_label + "," + prefix + to_label + "> " + to_string(polarity);
}

const char* to_string(PairKind k) {
  switch (k) {
    case PairKind::Plain: return "plain";
    case PairKind::CallerIsSuperclass: return "caller-is-superclass";
    case PairKind::CallerIsSubclass: return "caller-is-subclass";
  }
  return "?";
}

namespace {

BranchEdge make_edge(const Ccfg& g, int from, int slot) {
  const CfgNode& n = g.node(from);
  int local_to = n.succ[slot];
  int m = g.method_index_of(from);
  BranchEdge e;
  e.from = from;
  e.to = g.id(m, local_to);
  e.polarity = slot == 0 ? Polarity::True : Polarity::False;
  e.method = g.method_of(from).key();
  e.from_label = n.label;
  e.to_label = g.methods[m]->nodes[local_to].label;
  return e;
}

void method_edges(const Ccfg& g, int m, std::vector<BranchEdge>& out) {
  const MethodCfg& cfg = *g.methods[m];
  for (int n : cfg.branching_nodes()) {
    out.push_back(make_edge(g, g.id(m, n), 0));
    out.push_back(make_edge(g, g.id(m, n), 1));
  }
}

// Static call graph over (dynamic class of `this`, method key).
class CallGraph {
 public:
  explicit CallGraph(const CompiledProgram& prog) : prog_(prog), p_(prog.program()) {}

  bool reaches(const std::string& this_class, const std::string& key, const std::set<std::string>& targets) {
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<std::pair<std::string, std::string>> stack{{this_class, key}};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      if (!seen.insert(cur).second) continue;
      auto cfg = prog_.cfg(cur.second);
      if (!cfg) continue;
      for (const auto& node : cfg->nodes) {
        if (!node.is_call()) continue;
        const CallInfo& c = *node.call;
        std::vector<std::pair<std::string, std::string>> next;
        if (c.is_new) {
          if (const MethodDef* ctor = p_.get_class(c.static_class).ctor()) next.push_back({c.static_class, ctor->key()});
        } else if (c.on_this) {
          if (const MethodDef* m = find_dispatch(p_, cur.first, c.method)) next.push_back({cur.first, m->key()});
        } else {
          for (const auto& u : subtree(p_, c.static_class)) {
            if (const MethodDef* m = find_dispatch(p_, u, c.method)) next.push_back({u, m->key()});
          }
        }
        for (auto& n : next) {
          if (targets.count(n.second)) return true;
          stack.push_back(std::move(n));
        }
      }
    }
    return false;
  }

 private:
  const CompiledProgram& prog_;
  const Program& p_;
};

std::vector<std::string> compute_covering(const CompiledProgram& prog, const PairAnalysis& a) {
  const Program& p = prog.program();
  std::set<std::string> targets;
  for (const auto& t : a.targets) targets.insert(t.site.callees.begin(), t.site.callees.end());
  if (a.kind == PairKind::Plain) {
    for (const auto& u : subtree(p, a.callee)) {
      if (const MethodDef* c = p.get_class(u).ctor()) targets.insert(c->key());
      for (const MethodDef* m : visible_methods(p, u)) targets.insert(m->key());
    }
  }
  if (targets.empty()) return {};

  std::vector<const MethodDef*> candidates;
  if (const MethodDef* c = p.get_class(a.test_class).ctor()) candidates.push_back(c);
  for (const MethodDef* m : visible_methods(p, a.test_class)) {
    if (m->is_abstract || m->visibility == Visibility::Private) continue;
    bool in_role = a.kind == PairKind::Plain || a.caller_ccfg.method_index(m->key()) >= 0;
    if (in_role) candidates.push_back(m);
  }
  CallGraph cg(prog);
  std::vector<std::string> out;
  for (const MethodDef* m : candidates) {
    if (m->visibility == Visibility::Private) continue;
    if (cg.reaches(a.test_class, m->key(), targets)) out.push_back(m->key());
  }
  return out;
}

}  // namespace

std::vector<BranchEdge> branch_edges(const Ccfg& g) {
  std::vector<BranchEdge> out;
  for (int m = 0; m < static_cast<int>(g.methods.size()); ++m) method_edges(g, m, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BranchEdge> caller_target_branches(const Ccfg& caller, const PostDominators& pdom,
                                               const CallSite& site) {
  std::vector<BranchEdge> out;
  for (const auto& e : branch_edges(caller)) {
    if (pdom.dominates(site.node, e.to) && !pdom.dominates(site.node, e.from)) out.push_back(e);
  }
  return out;
}

std::vector<BranchEdge> callee_target_branches(const Ccfg& callee, const CallSite& site, bool single_method) {
  std::set<int> methods;
  std::vector<int> stack;
  for (const auto& key : site.callees) {
    int m = callee.method_index(key);
    if (m >= 0) stack.push_back(m);
  }
  while (!stack.empty()) {
    int m = stack.back();
    stack.pop_back();
    if (!methods.insert(m).second || single_method) continue;
    const MethodCfg& cfg = *callee.methods[m];
    for (int n = 0; n < static_cast<int>(cfg.nodes.size()); ++n) {
      if (auto target = callee.linked_callee(callee.id(m, n))) stack.push_back(callee.method_index(*target));
    }
  }
  std::vector<BranchEdge> out;
  for (int m : methods) method_edges(callee, m, out);
  std::sort(out.begin(), out.end());
  return out;
}

PairAnalysis analyze_pair(const CompiledProgram& prog, const std::string& caller, const std::string& callee,
                          const AnalysisOptions& opts) {
  const Program& p = prog.program();
  p.get_class(caller);
  p.get_class(callee);
  PairAnalysis a;
  a.caller = caller;
  a.callee = callee;
  if (caller != callee && is_subclass_of(p, callee, caller)) {
    a.kind = PairKind::CallerIsSuperclass;
    a.test_class = callee;
    a.caller_ccfg = build_ccfg(prog, caller, CcfgRole::SuperclassOfPair, callee);
    a.callee_ccfg = build_ccfg(prog, callee, CcfgRole::SubclassOfPair, caller);
  } else if (caller != callee && is_subclass_of(p, caller, callee)) {
    a.kind = PairKind::CallerIsSubclass;
    a.test_class = caller;
    a.caller_ccfg = build_ccfg(prog, caller, CcfgRole::SubclassOfPair, callee);
    a.callee_ccfg = build_ccfg(prog, callee, CcfgRole::SuperclassOfPair, caller);
  } else {
    a.kind = PairKind::Plain;
    a.test_class = caller;
    a.caller_ccfg = build_ccfg(prog, caller);
    a.callee_ccfg = build_ccfg(prog, callee);
  }

  PostDominators pdom(a.caller_ccfg.digraph());
  for (auto& site : find_call_sites(prog, a.caller_ccfg, callee)) {
    TargetSet t;
    t.caller = caller_target_branches(a.caller_ccfg, pdom, site);
    t.callee = callee_target_branches(a.callee_ccfg, site, opts.single_method_callee);
    t.site = std::move(site);
    a.targets.push_back(std::move(t));
  }

  using Key = std::tuple<int, int, int, int, int>;
  std::set<Key> seen;
  for (const auto& t : a.targets) {
    for (const auto& r : t.caller) {
      for (const auto& e : t.callee) {
        Key k{t.site.id, r.from, r.slot(), e.from, e.slot()};
        if (!seen.insert(k).second) continue;
        a.couples.push_back({0, t.site.id, r, e});
      }
    }
  }
  std::sort(a.couples.begin(), a.couples.end(), [](const CoupledBranch& x, const CoupledBranch& y) {
    return std::tie(x.site, x.caller, x.callee) < std::tie(y.site, y.caller, y.callee);
  });
  for (std::size_t i = 0; i < a.couples.size(); ++i) a.couples[i].id = static_cast<int>(i);
  a.covering = compute_covering(prog, a);
  return a;
}

std::vector<CoupledBranch> coupled_branches(const CompiledProgram& prog, const std::string& caller,
                                            const std::string& callee, const AnalysisOptions& opts) {
  return analyze_pair(prog, caller, callee, opts).couples;
}

std::vector<std::string> covering_methods(const CompiledProgram& prog, const std::string& caller,
                                          const std::string& callee) {
  return analyze_pair(prog, caller, callee).covering;
}

}  // namespace cbc
