#include "cbc/runtime/objective.hpp"

#include <limits>
#include <map>
#include <set>

namespace cbc {

namespace {

using Parents = std::vector<std::vector<EdgeRef>>;

Parents cd_parents(const Ccfg& g) {
  Digraph d = g.digraph();
  auto mask = g.branch_mask();
  Parents out(d.size());
  for (const auto& cd : control_dependencies(d, PostDominators(d), &mask)) out[cd.node].push_back(cd.edge);
  return out;
}

ApproachLevels levels_from(const Ccfg& g, const Parents& parents, const BranchEdge& target) {
  ApproachLevels lv;
  auto need = [&](int node, int slot) {
    return ApproachLevels::Need{g.method_of(node).key(), g.node(node).label, slot == 0};
  };
  lv.levels.push_back({need(target.from, target.slot())});
  std::map<int, int> level_of{{target.from, 0}};
  std::vector<int> frontier{target.from};
  for (int depth = 1; !frontier.empty(); ++depth) {
    std::vector<ApproachLevels::Need> level;
    std::set<std::pair<int, int>> added;
    std::vector<int> next;
    for (int n : frontier) {
      for (const EdgeRef& e : parents[n]) {
        auto it = level_of.find(e.from);
        if (it != level_of.end() && it->second < depth) continue;
        if (!added.insert({e.from, e.slot}).second) continue;
        level.push_back(need(e.from, e.slot));
        if (it == level_of.end()) {
          level_of[e.from] = depth;
          next.push_back(e.from);
        }
      }
    }
    if (level.empty()) break;
    lv.levels.push_back(std::move(level));
    frontier = std::move(next);
  }
  return lv;
}

}  // namespace

ApproachLevels approach_levels(const Ccfg& g, const BranchEdge& target) {
  return levels_from(g, cd_parents(g), target);
}

Approach approach(const ApproachLevels& lv, const Trace& t,
                  const std::vector<std::pair<std::int64_t, std::int64_t>>* windows) {
  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> best(lv.levels.size(), kNone);
  std::vector<bool> hit(lv.levels.size(), false);
  for (const auto& e : t.events) {
    if (windows) {
      bool inside = false;
      for (const auto& [lo, hi] : *windows) inside = inside || (lo < e.seq && e.seq < hi);
      if (!inside) continue;
    }
    for (std::size_t k = 0; k < lv.levels.size(); ++k) {
      for (const auto& n : lv.levels[k]) {
        if (n.label != e.label || n.method != e.method) continue;
        hit[k] = true;
        best[k] = std::min(best[k], n.polarity ? e.dist_true : e.dist_false);
      }
    }
  }
  for (std::size_t k = 0; k < lv.levels.size(); ++k) {
    if (hit[k]) return {static_cast<int>(k), best[k]};
  }
  return {static_cast<int>(lv.levels.size()), -1};
}

int approach_level(const Trace& t, const BranchEdge& target, const Ccfg& g) {
  return approach(approach_levels(g, target), t).level;
}

ObjectiveEvaluator::ObjectiveEvaluator(const PairAnalysis& a) : a_(&a) {
  Parents pr = cd_parents(a.caller_ccfg);
  Parents pe = cd_parents(a.callee_ccfg);
  for (const auto& c : a.couples) {
    caller_.push_back(levels_from(a.caller_ccfg, pr, c.caller));
    callee_.push_back(levels_from(a.callee_ccfg, pe, c.callee));
  }
}

ObjectiveScore ObjectiveEvaluator::score(int couple, const Trace& t) const {
  const CoupledBranch& c = a_->couples[couple];
  ObjectiveScore s;
  s.couple = couple;
  s.caller = approach(caller_[couple], t);
  s.caller_d = s.caller.value();
  if (s.caller_d > 0) {
    s.callee = {static_cast<int>(callee_[couple].levels.size()), -1};
    s.callee_d = s.callee.value();
    s.value = s.caller_d + 1;
    return s;
  }
  const CallSite& site = a_->targets.at(c.site).site;
  auto frames = frames_after_branch(t, site.caller_method, site.label, c.caller.method, c.caller.from_label,
                                    c.caller.polarity == Polarity::True);
  std::vector<std::pair<std::int64_t, std::int64_t>> windows;
  for (const Frame* f : frames) windows.emplace_back(f->start, f->end);
  s.callee = approach(callee_[couple], t, &windows);
  s.callee_d = s.callee.value();
  s.value = s.callee_d;
  return s;
}

std::vector<double> ObjectiveEvaluator::values(const Trace& t) const {
  std::vector<double> out;
  out.reserve(size());
  for (int i = 0; i < static_cast<int>(size()); ++i) out.push_back(score(i, t).value);
  return out;
}

}  // namespace cbc
