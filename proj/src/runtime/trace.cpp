#include "cbc/runtime/trace.hpp"

namespace cbc {

std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case OutcomeKind::Value: return o.value;
    case OutcomeKind::Void: return "void";
    case OutcomeKind::Error: return "error:" + o.error + "@" + o.location;
    case OutcomeKind::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

std::vector<const Frame*> frames_after_branch(const Trace& t, const std::string& site_method,
                                              const std::string& site_label, const std::string& branch_method,
                                              const std::string& branch_label, bool polarity) {
  // (event seq, end of the event's frame) for each matching event.
  std::vector<std::pair<std::int64_t, std::int64_t>> windows;
  for (const auto& e : t.events) {
    if (e.taken_true == polarity && e.label == branch_label && e.method == branch_method) {
      windows.emplace_back(e.seq, t.frames[e.frame].end);
    }
  }
  std::vector<const Frame*> out;
  if (windows.empty()) return out;
  for (const auto& f : t.frames) {
    if (f.site_label != site_label || f.site_method != site_method) continue;
    for (const auto& [seq, end] : windows) {
      if (seq < f.start && f.start <= end) {
        out.push_back(&f);
        break;
      }
    }
  }
  return out;
}

bool edge_taken(const Trace& t, const std::string& method, const std::string& label, bool polarity) {
  for (const auto& e : t.events) {
    if (e.taken_true == polarity && e.label == label && e.method == method) return true;
  }
  return false;
}

nlohmann::json to_json(const Trace& t) {
  using nlohmann::json;
  json frames = json::array();
  for (const auto& f : t.frames) {
    json j{{"id", f.id}, {"parent", f.parent}, {"method", f.method}, {"start", f.start}, {"end", f.end}};
    if (!f.site_method.empty()) j["call_site"] = {{"method", f.site_method}, {"node", f.site_label}};
    frames.push_back(std::move(j));
  }
  json events = json::array();
  for (const auto& e : t.events) {
    events.push_back({{"seq", e.seq},
                      {"frame", e.frame},
                      {"method", e.method},
                      {"node", e.label},
                      {"taken", e.taken_true},
                      {"dist_true", e.dist_true},
                      {"dist_false", e.dist_false}});
  }
  json outcomes = json::array();
  for (const auto& o : t.outcomes) {
    json j{{"stmt", o.stmt}};
    switch (o.kind) {
      case OutcomeKind::Value: j["value"] = o.value; break;
      case OutcomeKind::Void: j["void"] = true; break;
      case OutcomeKind::Error: j["error"] = {{"kind", o.error}, {"location", o.location}}; break;
      case OutcomeKind::BudgetExhausted: j["budget_exhausted"] = true; break;
    }
    outcomes.push_back(std::move(j));
  }
  json visited = json::array();
  for (const auto& [m, line] : t.visited) visited.push_back({m, line});
  return {{"frames", frames},     {"events", events}, {"outcomes", outcomes}, {"visited", visited},
          {"steps", t.steps}, {"budget_exhausted", t.budget_exhausted}};
}

}  // namespace cbc
