#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbc/cfg/method_cfg.hpp"
#include "cbc/flow/digraph.hpp"

namespace cbc {

enum class CcfgRole { Plain, SuperclassOfPair, SubclassOfPair };

const char* to_string(CcfgRole r);

/// Class-level CFG: the method CFGs of one class joined at calls on `this`.
/// Global node ids are contiguous per method.
class Ccfg {
 public:
  struct Link {
    int from = 0;
    int to = 0;
  };

  std::string owner;
  CcfgRole role = CcfgRole::Plain;
  std::optional<std::string> paired;
  std::vector<std::shared_ptr<const MethodCfg>> methods;
  std::vector<Link> links;  // call -> callee Entry, callee Exit -> return

  int size() const { return static_cast<int>(method_of_node_.size()); }
  int id(int method, int local) const { return offsets_[method] + local; }
  int method_index_of(int id) const { return method_of_node_[id]; }
  int local_of(int id) const { return id - offsets_[method_of_node_[id]]; }
  const CfgNode& node(int id) const;
  const MethodCfg& method_of(int id) const { return *methods[method_of_node_[id]]; }

  /// -1 when the method is not part of this graph.
  int method_index(const std::string& key) const;
  std::optional<int> find(const std::string& method_key, const std::string& label) const;
  /// Method key a call node is wired into, if the call was linked.
  std::optional<std::string> linked_callee(int id) const;

  /// Adds a virtual entry (size()) and exit (size() + 1) around all methods.
  Digraph digraph() const;
  /// Condition nodes, indexed like digraph() nodes.
  std::vector<bool> branch_mask() const;
  std::string to_dot() const;

  // Used by build_ccfg.
  void add_method(std::shared_ptr<const MethodCfg> m);

 private:
  std::vector<int> offsets_;
  std::vector<int> method_of_node_;
};

/// Plain: every method callable on `cls` plus its ctor.
/// SuperclassOfPair: methods of `cls` that `paired` does not override.
/// SubclassOfPair: methods declared in `cls`.
Ccfg build_ccfg(const CompiledProgram& prog, const std::string& cls, CcfgRole role = CcfgRole::Plain,
                const std::optional<std::string>& paired = std::nullopt);

struct CallSite {
  int id = 0;
  std::string caller_method;  // method key
  std::string label;
  int line = 0;
  int node = 0;                     // Ccfg node id
  std::vector<std::string> callees;  // method keys
};

/// Call nodes in the caller graph that may invoke a method of `callee_class`.
/// The caller's role decides which calls count.
std::vector<CallSite> find_call_sites(const CompiledProgram& prog, const Ccfg& caller,
                                      const std::string& callee_class);

}  // namespace cbc
