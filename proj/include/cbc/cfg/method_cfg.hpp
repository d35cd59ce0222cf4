#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbc/lang/ast.hpp"

namespace cbc {

enum class Polarity { True, False, Unconditional };

const char* to_string(Polarity p);

enum class NodeKind { Entry, Exit, Block, Call, Return };

/// A call isolated into its own node. Receiver and arguments are call-free
/// expressions over locals; their evaluation cannot branch.
struct CallInfo {
  bool is_new = false;
  bool on_this = false;
  std::string static_class;  // receiver static type, or the instantiated class
  std::string method;        // "<init>" for `new`
  std::optional<Expr> receiver;
  std::vector<Expr> args;
  int dst_slot = -1;
  int line = 0;
};

enum class InstrKind { Assign, StoreField, Return };

struct Instr {
  InstrKind kind = InstrKind::Assign;
  int line = 0;
  int slot = -1;             // Assign
  std::string field;         // StoreField
  std::string field_owner;   // StoreField
  std::optional<Expr> object;  // StoreField target object
  std::optional<Expr> value;   // Assign / StoreField / Return (absent for `return;`)
};

struct CfgNode {
  NodeKind kind = NodeKind::Block;
  std::string label;
  int line = 0;
  std::vector<Instr> instrs;
  std::optional<Expr> condition;  // set on branching nodes
  int condition_line = 0;
  std::optional<CallInfo> call;   // set on call nodes
  std::vector<int> succ;          // branching: {true, false}

  bool is_branch() const { return condition.has_value(); }
  bool is_call() const { return call.has_value(); }
};

struct CfgEdge {
  int from = 0;
  int to = 0;
  Polarity polarity = Polarity::Unconditional;
};

/// Basic-block CFG of one method or ctor. Node 0 is Entry, node 1 is Exit.
/// Labels are class-relative source lines of the block's first statement;
/// calls on `this` become a call node "<line>c" and a return node "<line>r".
class MethodCfg {
 public:
  static constexpr int kEntry = 0;
  static constexpr int kExit = 1;

  std::string class_name;
  std::string method_name;
  std::vector<Type> slot_types;  // params, named locals, then temporaries
  int num_params = 0;
  std::vector<CfgNode> nodes;

  std::string key() const { return class_name + "." + method_name; }
  std::vector<CfgEdge> edges() const;
  std::optional<int> find(const std::string& label) const;
  std::vector<int> branching_nodes() const;
};

/// Lowers a method body into a CFG. Short-circuit operators become chains
/// of single-condition branching nodes. Throws CfgError on unreachable code
/// or nodes that cannot reach Exit.
MethodCfg build_method_cfg(const Program& program, const MethodDef& method);

/// A resolved Program with the CFG of every concrete method and ctor.
/// Copies share the underlying immutable data.
class CompiledProgram {
 public:
  explicit CompiledProgram(Program program);

  const Program& program() const { return *program_; }
  /// nullptr for abstract methods and unknown keys.
  std::shared_ptr<const MethodCfg> cfg(const std::string& method_key) const;

 private:
  std::shared_ptr<const Program> program_;
  std::map<std::string, std::shared_ptr<const MethodCfg>> cfgs_;
};

/// Class-relative line: the `class` keyword line is 1.
int relative_line(const ClassDef& cls, int absolute_line);

}  // namespace cbc
