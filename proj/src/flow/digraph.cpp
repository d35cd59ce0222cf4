#include "cbc/flow/digraph.hpp"

#include <algorithm>

#include "cbc/errors.hpp"

namespace cbc {

std::vector<std::vector<int>> Digraph::preds() const {
  std::vector<std::vector<int>> p(succ.size());
  for (int n = 0; n < size(); ++n) {
    for (int s : succ[n]) p[s].push_back(n);
  }
  return p;
}

PostDominators::PostDominators(const Digraph& g) {
  const int n = g.size();
  auto p = g.preds();
  std::vector<bool> reaches(n, false);
  std::vector<int> stack{g.exit};
  reaches[g.exit] = true;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int q : p[x]) {
      if (!reaches[q]) {
        reaches[q] = true;
        stack.push_back(q);
      }
    }
  }
  for (int x = 0; x < n; ++x) {
    if (!reaches[x]) throw CfgError("node " + std::to_string(x) + " cannot reach the exit");
  }

  sets_.assign(n, std::vector<bool>(n, true));
  sets_[g.exit].assign(n, false);
  sets_[g.exit][g.exit] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 0; x < n; ++x) {
      if (x == g.exit) continue;
      std::vector<bool> next(n, true);
      for (int s : g.succ[x]) {
        for (int d = 0; d < n; ++d) next[d] = next[d] && sets_[s][d];
      }
      next[x] = true;
      if (next != sets_[x]) {
        sets_[x] = std::move(next);
        changed = true;
      }
    }
  }
}

std::set<int> PostDominators::of(int n) const {
  std::set<int> out;
  for (int d = 0; d < static_cast<int>(sets_[n].size()); ++d) {
    if (sets_[n][d]) out.insert(d);
  }
  return out;
}

std::vector<ControlDependence> control_dependencies(const Digraph& g, const PostDominators& pdom,
                                                    const std::vector<bool>* is_branch) {
  std::vector<ControlDependence> out;
  for (int u = 0; u < g.size(); ++u) {
    if (g.succ[u].size() < 2) continue;
    if (is_branch && !(*is_branch)[u]) continue;
    for (int k = 0; k < static_cast<int>(g.succ[u].size()); ++k) {
      int v = g.succ[u][k];
      for (int n = 0; n < g.size(); ++n) {
        if (pdom.dominates(n, v) && !pdom.dominates(n, u)) out.push_back({n, {u, k}});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cbc
