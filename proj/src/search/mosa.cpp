#include "cbc/search/mosa.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

#include "cbc/errors.hpp"
#include "cbc/flow/cbc_score.hpp"
#include "cbc/runtime/interpreter.hpp"
#include "cbc/runtime/objective.hpp"

namespace cbc {

void Archive::offer(const TestCase& t, const std::vector<double>& values) {
  for (int c = 0; c < static_cast<int>(values.size()); ++c) {
    double v = values[c];
    auto it = best_.find(c);
    bool better;
    if (it == best_.end()) {
      better = true;
    } else if (v != it->second.value) {
      better = v < it->second.value;
    } else {
      better = t.stmts.size() < it->second.test.stmts.size();
    }
    if (!better) continue;
    best_[c] = {t, v};
    if (v == 0.0) covered_.insert(c);
  }
}

namespace {

nlohmann::json arg_json(const Arg& a) {
  switch (a.kind) {
    case Arg::Kind::Int: return {{"int", a.value}};
    case Arg::Kind::Bool: return {{"bool", a.value != 0}};
    case Arg::Kind::Null: return {{"null", true}};
    case Arg::Kind::Ref: return {{"var", a.ref}};
  }
  return {};
}

Arg arg_from(const nlohmann::json& j) {
  if (j.contains("int")) return Arg::int_lit(j.at("int").get<std::int64_t>());
  if (j.contains("bool")) return Arg::bool_lit(j.at("bool").get<bool>());
  if (j.contains("var")) return Arg::var(j.at("var").get<int>());
  if (j.contains("null")) return Arg::null_lit();
  throw Error("malformed test argument: " + j.dump());
}

Type type_from(const std::string& s) {
  if (s == "int") return Type::int_type();
  if (s == "bool") return Type::bool_type();
  return Type::ref(s);
}

}  // namespace

nlohmann::json to_json(const TestCase& t) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : t.stmts) {
    nlohmann::json j;
    nlohmann::json args = nlohmann::json::array();
    for (const auto& a : s.args) args.push_back(arg_json(a));
    switch (s.kind) {
      case Statement::Kind::Construct:
        j = {{"kind", "construct"}, {"class", s.class_name}, {"args", args}};
        break;
      case Statement::Kind::Assign:
        j = {{"kind", "assign"}, {"type", to_string(s.type)}, {"literal", arg_json(s.literal)}};
        break;
      case Statement::Kind::Invoke:
        j = {{"kind", "invoke"}, {"receiver", s.receiver}, {"method", s.method}, {"args", args}};
        break;
    }
    out.push_back(std::move(j));
  }
  return out;
}

TestCase test_from_json(const nlohmann::json& j) {
  TestCase t;
  for (const auto& s : j) {
    std::string kind = s.at("kind").get<std::string>();
    std::vector<Arg> args;
    if (s.contains("args")) {
      for (const auto& a : s.at("args")) args.push_back(arg_from(a));
    }
    if (kind == "construct") {
      t.stmts.push_back(Statement::construct(s.at("class").get<std::string>(), std::move(args)));
    } else if (kind == "assign") {
      t.stmts.push_back(Statement::assign(type_from(s.at("type").get<std::string>()), arg_from(s.at("literal"))));
    } else if (kind == "invoke") {
      t.stmts.push_back(
          Statement::invoke(s.at("receiver").get<int>(), s.at("method").get<std::string>(), std::move(args)));
    } else {
      throw Error("unknown statement kind '" + kind + "'");
    }
  }
  return t;
}

nlohmann::json to_json(const Program& program, const TestSuite& s) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& e : s.tests) {
    tests.push_back({{"covers", e.covers}, {"statements", to_json(e.test)}, {"source", to_source(program, e.test)}});
  }
  return {{"caller", s.caller}, {"callee", s.callee}, {"test_class", s.test_class}, {"tests", tests}};
}

TestSuite suite_from_json(const nlohmann::json& j) {
  TestSuite s;
  s.caller = j.value("caller", "");
  s.callee = j.value("callee", "");
  s.test_class = j.value("test_class", "");
  for (const auto& e : j.at("tests")) {
    SuiteEntry entry;
    entry.test = test_from_json(e.at("statements"));
    if (e.contains("covers")) entry.covers = e.at("covers").get<std::vector<int>>();
    s.tests.push_back(std::move(entry));
  }
  return s;
}

const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Ok: return "ok";
    case SearchStatus::NoCoupledBranches: return "no-coupled-branches";
    case SearchStatus::NoCoveringMethods: return "no-covering-methods";
  }
  return "?";
}

nlohmann::json to_json(const SearchReport& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& g : r.history) {
    hist.push_back({{"generation", g.generation},
                    {"covered", g.covered},
                    {"evaluations", g.evaluations},
                    {"archive_size", g.archive_size}});
  }
  nlohmann::json out = {{"status", to_string(r.status)},
                        {"couples", r.couples},
                        {"evaluations", r.evaluations},
                        {"history", hist},
                        {"invariant_violations", r.invariant_violations},
                        {"repair",
                         {{"crossover_children", r.repair.crossover_children},
                          {"crossover_replaced", r.repair.crossover_replaced},
                          {"mutations", r.repair.mutations},
                          {"repairs_started", r.repair.repairs_started},
                          {"repair_attempts", r.repair.repair_attempts},
                          {"repairs_succeeded", r.repair.repairs_succeeded},
                          {"repairs_abandoned", r.repair.repairs_abandoned}}}};
  out["cbc"] = r.cbc ? nlohmann::json(*r.cbc) : nlohmann::json(nullptr);
  return out;
}

std::vector<int> preference_ranks(const std::vector<std::vector<double>>& values, const std::vector<int>& open,
                                  const std::vector<std::size_t>& lengths) {
  const int n = static_cast<int>(values.size());
  std::vector<int> rank(n, -1);
  for (int o : open) {
    int best = -1;
    for (int r = 0; r < n; ++r) {
      if (best < 0 || values[r][o] < values[best][o] ||
          (values[r][o] == values[best][o] && lengths[r] < lengths[best])) {
        best = r;
      }
    }
    if (best >= 0) rank[best] = 0;
  }
  auto dominates = [&](int a, int b) {
    bool strict = false;
    for (int o : open) {
      if (values[a][o] > values[b][o]) return false;
      if (values[a][o] < values[b][o]) strict = true;
    }
    return strict;
  };
  std::vector<int> rest;
  for (int r = 0; r < n; ++r) {
    if (rank[r] < 0) rest.push_back(r);
  }
  std::vector<int> dominated_by(n, 0);
  std::vector<std::vector<int>> dominates_list(n);
  for (int a : rest) {
    for (int b : rest) {
      if (a != b && dominates(a, b)) {
        dominates_list[a].push_back(b);
        ++dominated_by[b];
      }
    }
  }
  std::vector<int> front;
  for (int r : rest) {
    if (dominated_by[r] == 0) front.push_back(r);
  }
  for (int level = 1; !front.empty(); ++level) {
    std::vector<int> next;
    for (int a : front) {
      rank[a] = level;
      for (int b : dominates_list[a]) {
        if (--dominated_by[b] == 0) next.push_back(b);
      }
    }
    std::sort(next.begin(), next.end());
    front = std::move(next);
  }
  return rank;
}

std::vector<double> crowding_distance(const std::vector<std::vector<double>>& values,
                                      const std::vector<int>& front, const std::vector<int>& open) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  std::vector<std::size_t> order(n);
  for (int o : open) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[front[a]][o] < values[front[b]][o]; });
    double lo = values[front[order.front()]][o];
    double hi = values[front[order.back()]][o];
    dist[order.front()] = dist[order.back()] = std::numeric_limits<double>::infinity();
    if (hi <= lo) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      dist[order[k]] += (values[front[order[k + 1]]][o] - values[front[order[k - 1]]][o]) / (hi - lo);
    }
  }
  return dist;
}

}  // namespace cbc
