#include "cbc/flow/cbc_score.hpp"

namespace cbc {

const char* to_string(CbcMatching m) { return m == CbcMatching::Scoped ? "scoped" : "whole-test"; }

std::optional<CbcMatching> parse_cbc_matching(const std::string& s) {
  if (s == "scoped") return CbcMatching::Scoped;
  if (s == "whole-test") return CbcMatching::WholeTest;
  return std::nullopt;
}

bool couple_covered(const PairAnalysis& a, const CoupledBranch& c, const Trace& t, CbcMatching mode) {
  bool r_pol = c.caller.polarity == Polarity::True;
  bool e_pol = c.callee.polarity == Polarity::True;
  if (mode == CbcMatching::WholeTest) {
    return edge_taken(t, c.caller.method, c.caller.from_label, r_pol) &&
           edge_taken(t, c.callee.method, c.callee.from_label, e_pol);
  }
  const CallSite& site = a.targets.at(c.site).site;
  auto frames = frames_after_branch(t, site.caller_method, site.label, c.caller.method, c.caller.from_label, r_pol);
  if (frames.empty()) return false;
  for (const auto& e : t.events) {
    if (e.taken_true != e_pol || e.label != c.callee.from_label || e.method != c.callee.method) continue;
    for (const Frame* g : frames) {
      if (g->start < e.seq && e.seq < g->end) return true;
    }
  }
  return false;
}

std::optional<double> cbc_score(const PairAnalysis& a, const std::vector<Trace>& traces, CbcMatching mode) {
  if (a.couples.empty()) return std::nullopt;
  std::size_t covered = 0;
  for (const auto& c : a.couples) {
    for (const auto& t : traces) {
      if (couple_covered(a, c, t, mode)) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(a.couples.size());
}

}  // namespace cbc
