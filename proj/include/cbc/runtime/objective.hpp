#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cbc/flow/coupling.hpp"
#include "cbc/runtime/trace.hpp"

namespace cbc {

/// Maps a raw branch distance into [0, 1).
inline double normalize(double x) { return x / (x + 1.0); }

/// Control-dependence ancestry of a target edge. Level 0 is the edge's own
/// source; level k+1 holds the branches that level k depends on.
struct ApproachLevels {
  struct Need {
    std::string method;
    std::string label;
    bool polarity = true;
  };
  std::vector<std::vector<Need>> levels;
};

ApproachLevels approach_levels(const Ccfg& g, const BranchEdge& target);

struct Approach {
  int level = 0;            // approach level; levels.size() when nothing executed
  std::int64_t distance = 0;  // raw distance at that level; -1 when nothing executed

  /// al + normalized bd, with bd = 1 when nothing executed.
  double value() const { return level + (distance < 0 ? 1.0 : normalize(static_cast<double>(distance))); }
};

/// Closest executed level and its best distance. `windows`, when given,
/// keeps only events whose sequence number lies strictly inside one.
Approach approach(const ApproachLevels& lv, const Trace& t,
                  const std::vector<std::pair<std::int64_t, std::int64_t>>* windows = nullptr);

int approach_level(const Trace& t, const BranchEdge& target, const Ccfg& g);

struct ObjectiveScore {
  int couple = 0;
  double value = 0;
  Approach caller;
  Approach callee;  // meaningful only when the caller side is reached
  double caller_d = 0;
  double callee_d = 0;
};

/// Per-couple objectives of a pair: D(r)+1 while the caller branch is
/// missed, otherwise the callee distance measured inside calls made at the
/// couple's site after the caller branch.
class ObjectiveEvaluator {
 public:
  explicit ObjectiveEvaluator(const PairAnalysis& a);

  ObjectiveScore score(int couple, const Trace& t) const;
  std::vector<double> values(const Trace& t) const;
  std::size_t size() const { return caller_.size(); }

 private:
  const PairAnalysis* a_;
  std::vector<ApproachLevels> caller_;
  std::vector<ApproachLevels> callee_;
};

}  // namespace cbc
