#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cbc {

/// One method activation. `start`/`end` are sequence numbers; every event
/// of the activation and its callees lies strictly between them.
struct Frame {
  int id = 0;
  int parent = -1;
  std::string method;       // method key
  std::string site_method;  // caller method key; empty for test statements
  std::string site_label;   // caller node label
  std::int64_t start = 0;
  std::int64_t end = 0;
};

struct BranchEvent {
  std::int64_t seq = 0;
  int frame = 0;
  std::string method;
  std::string label;
  bool taken_true = false;
  std::int64_t dist_true = 0;
  std::int64_t dist_false = 0;
};

enum class OutcomeKind { Value, Void, Error, BudgetExhausted };

/// Observable result of one executed Construct or Invoke statement.
struct Outcome {
  int stmt = 0;
  OutcomeKind kind = OutcomeKind::Void;
  std::string value;     // Value: "42", "true", "null" or the object's class
  std::string error;     // Error: div-by-zero, null-deref, abstract-instantiation, stack-overflow
  std::string location;  // Error: "Class.method:label" or "test:<index>"

  bool operator==(const Outcome&) const = default;
};

std::string to_string(const Outcome& o);

struct Trace {
  std::vector<Frame> frames;
  std::vector<BranchEvent> events;
  std::set<std::pair<std::string, int>> visited;  // (method key, class-relative line)
  std::vector<Outcome> outcomes;
  std::int64_t steps = 0;
  bool budget_exhausted = false;
};

/// Frames started at call site (method, label) after some event of branch
/// (branch_method, branch_label, polarity) and while that event's frame was
/// still active.
std::vector<const Frame*> frames_after_branch(const Trace& t, const std::string& site_method,
                                              const std::string& site_label, const std::string& branch_method,
                                              const std::string& branch_label, bool polarity);

/// Whether the edge (method, label, polarity) was taken anywhere in the trace.
bool edge_taken(const Trace& t, const std::string& method, const std::string& label, bool polarity);

nlohmann::json to_json(const Trace& t);

}  // namespace cbc
