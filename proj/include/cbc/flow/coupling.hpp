#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbc/cfg/ccfg.hpp"
#include "cbc/flow/digraph.hpp"

namespace cbc {

/// Outgoing edge of a branching node, identified by Ccfg node id and polarity.
struct BranchEdge {
  int from = 0;  // Ccfg node id
  int to = 0;    // Ccfg node id
  Polarity polarity = Polarity::True;
  std::string method;  // method key owning both endpoints
  std::string from_label;
  std::string to_label;

  int slot() const { return polarity == Polarity::True ? 0 : 1; }
  /// "<13,16> false"; `prefix` is prepended to both labels.
  std::string describe(const std::string& prefix = "") const;
  bool operator<(const BranchEdge& o) const {
    return from != o.from ? from < o.from : slot() < o.slot();
  }
  bool operator==(const BranchEdge& o) const { return from == o.from && polarity == o.polarity; }
};

/// All branch edges of the graph, ordered by source node then polarity.
std::vector<BranchEdge> branch_edges(const Ccfg& g);

enum class PairKind { Plain, CallerIsSuperclass, CallerIsSubclass };

const char* to_string(PairKind k);

struct TargetSet {
  CallSite site;
  std::vector<BranchEdge> caller;  // B_R(s)
  std::vector<BranchEdge> callee;  // B_E(s)
};

struct CoupledBranch {
  int id = 0;
  int site = 0;  // CallSite id
  BranchEdge caller;
  BranchEdge callee;
};

struct AnalysisOptions {
  /// Restrict callee targets to the method called at the site, without
  /// following its calls on `this`.
  bool single_method_callee = false;
};

/// Everything the search needs for one (caller, callee) pair.
struct PairAnalysis {
  std::string caller;
  std::string callee;
  PairKind kind = PairKind::Plain;
  std::string test_class;  // class the generated tests instantiate
  Ccfg caller_ccfg;
  Ccfg callee_ccfg;
  std::vector<TargetSet> targets;
  std::vector<CoupledBranch> couples;
  std::vector<std::string> covering;  // method keys invocable on test_class
};

/// B_R(s): branch edges post-dominated by the site but not by their source.
std::vector<BranchEdge> caller_target_branches(const Ccfg& caller, const PostDominators& pdom,
                                               const CallSite& site);

/// B_E(s): branch edges of the called methods, following calls on `this`
/// inside the callee graph unless `single_method` is set.
std::vector<BranchEdge> callee_target_branches(const Ccfg& callee, const CallSite& site,
                                               bool single_method = false);

/// Public or protected methods (and the ctor) of the tested class that reach
/// a callee method through the static call graph, ctor first, then in
/// vtable order.
std::vector<std::string> covering_methods(const CompiledProgram& prog, const std::string& caller,
                                          const std::string& callee);

PairAnalysis analyze_pair(const CompiledProgram& prog, const std::string& caller, const std::string& callee,
                          const AnalysisOptions& opts = {});

std::vector<CoupledBranch> coupled_branches(const CompiledProgram& prog, const std::string& caller,
                                            const std::string& callee, const AnalysisOptions& opts = {});

}  // namespace cbc
