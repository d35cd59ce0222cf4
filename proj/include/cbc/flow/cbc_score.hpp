#pragma once

#include <optional>
#include <vector>

#include "cbc/flow/coupling.hpp"
#include "cbc/runtime/trace.hpp"

namespace cbc {

enum class CbcMatching {
  Scoped,     // callee branch inside a call made at the couple's site, after the caller branch
  WholeTest,  // both branches anywhere in the same test
};

const char* to_string(CbcMatching m);
std::optional<CbcMatching> parse_cbc_matching(const std::string& s);

bool couple_covered(const PairAnalysis& a, const CoupledBranch& c, const Trace& t,
                    CbcMatching mode = CbcMatching::Scoped);

/// Fraction of couples covered by at least one trace; nullopt when the pair
/// has no couples.
std::optional<double> cbc_score(const PairAnalysis& a, const std::vector<Trace>& traces,
                                CbcMatching mode = CbcMatching::Scoped);

}  // namespace cbc
