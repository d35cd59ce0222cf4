#pragma once

#include <set>
#include <vector>

namespace cbc {

/// Plain directed graph with one entry and one exit. Successor order is
/// significant: an edge is identified by (source, position in succ list).
struct Digraph {
  int entry = 0;
  int exit = 0;
  std::vector<std::vector<int>> succ;

  int size() const { return static_cast<int>(succ.size()); }
  std::vector<std::vector<int>> preds() const;
};

/// Reflexive post-dominator relation.
class PostDominators {
 public:
  /// Throws CfgError if some node cannot reach the exit.
  explicit PostDominators(const Digraph& g);

  /// Whether `d` post-dominates `n`.
  bool dominates(int d, int n) const { return sets_[n][d]; }
  std::set<int> of(int n) const;

 private:
  std::vector<std::vector<bool>> sets_;
};

struct EdgeRef {
  int from = 0;
  int slot = 0;  // index into succ[from]

  auto operator<=>(const EdgeRef&) const = default;
};

struct ControlDependence {
  int node = 0;
  EdgeRef edge;

  auto operator<=>(const ControlDependence&) const = default;
};

/// Pairs (n, e) where n post-dominates the target of e but not its source.
/// Only edges out of nodes with two or more successors are considered;
/// `is_branch`, when given, further restricts the source nodes.
std::vector<ControlDependence> control_dependencies(const Digraph& g, const PostDominators& pdom,
                                                    const std::vector<bool>* is_branch = nullptr);

}  // namespace cbc
