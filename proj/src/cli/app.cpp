#include "cbc/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "cbc/cli/manifest.hpp"
#include "cbc/errors.hpp"
#include "cbc/flow/cbc_score.hpp"
#include "cbc/lang/parser.hpp"
#include "cbc/mutation/mutation.hpp"
#include "cbc/runtime/interpreter.hpp"
#include "cbc/search/mosa.hpp"

#ifndef CBC_VERSION
#define CBC_VERSION "0.0.0"
#endif

namespace cbc {

namespace {

struct Exit {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kExitInput, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Exit{kExitInput, "cannot write '" + path + "'"};
  f << text;
}

void write_json(const std::string& path, const nlohmann::json& j, std::ostream& out) {
  write_text(path, j.dump(2) + "\n", out);
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

struct Context {
  std::ostream& out;
  RunManifest manifest;
};

CompiledProgram load_program(const std::string& path, RunManifest& m) {
  std::string src = read_file(path);
  m.add_input(path, src);
  try {
    return CompiledProgram(parse_program(src));
  } catch (const UnknownClassError& e) {
    throw Exit{kExitInput, path + ": " + e.what()};
  } catch (const Error& e) {
    throw Exit{kExitInput, path + ": " + e.what()};
  }
}

void require_class(const Program& p, const std::string& cls) {
  if (!p.find_class(cls)) throw Exit{kExitUnknownClass, "unknown class '" + cls + "'"};
}

PairAnalysis analyze(const CompiledProgram& prog, const std::string& caller, const std::string& callee,
                     bool single_method) {
  require_class(prog.program(), caller);
  require_class(prog.program(), callee);
  try {
    return analyze_pair(prog, caller, callee, AnalysisOptions{single_method});
  } catch (const UnknownClassError& e) {
    throw Exit{kExitUnknownClass, e.what()};
  } catch (const Error& e) {
    throw Exit{kExitInput, e.what()};
  }
}

nlohmann::json edge_json(const BranchEdge& e) {
  return {{"method", e.method}, {"from", e.from_label}, {"to", e.to_label}, {"polarity", to_string(e.polarity)}};
}

std::string couple_text(const CoupledBranch& c) { return c.caller.describe() + " x " + c.callee.describe("b"); }

nlohmann::json analysis_json(const PairAnalysis& a) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& t : a.targets) {
    nlohmann::json br = nlohmann::json::array(), be = nlohmann::json::array();
    for (const auto& e : t.caller) br.push_back(edge_json(e));
    for (const auto& e : t.callee) be.push_back(edge_json(e));
    sites.push_back({{"id", t.site.id},
                     {"method", t.site.caller_method},
                     {"label", t.site.label},
                     {"line", t.site.line},
                     {"callees", t.site.callees},
                     {"caller_branches", br},
                     {"callee_branches", be}});
  }
  nlohmann::json couples = nlohmann::json::array();
  for (const auto& c : a.couples) {
    couples.push_back({{"id", c.id},
                       {"site", c.site},
                       {"caller", edge_json(c.caller)},
                       {"callee", edge_json(c.callee)},
                       {"text", couple_text(c)}});
  }
  return {{"status", a.couples.empty() ? "no-coupled-branches" : "ok"},
          {"caller", a.caller},
          {"callee", a.callee},
          {"kind", to_string(a.kind)},
          {"test_class", a.test_class},
          {"covering", a.covering},
          {"sites", sites},
          {"couples", couples}};
}

TestSuite load_suite(const std::string& path, const Program& program, RunManifest& m) {
  std::string text = read_file(path);
  m.add_input(path, text);
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) return {};
  TestSuite s;
  try {
    s = suite_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Exit{kExitInput, path + ": malformed suite: " + e.what()};
  } catch (const Error& e) {
    throw Exit{kExitInput, path + ": malformed suite: " + e.what()};
  }
  for (std::size_t i = 0; i < s.tests.size(); ++i) {
    if (auto err = validate_test(program, s.tests[i].test)) {
      throw Exit{kExitSuiteMismatch, path + ": test " + std::to_string(i) + ": " + *err};
    }
  }
  return s;
}

void dump_traces(const std::string& path, const RunManifest& m, const std::vector<Trace>& traces, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : traces) arr.push_back(to_json(t));
  write_json(path, wrap_report(m, {{"traces", arr}}), out);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CBCFORGE_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Exit{kExitInput, std::string("CBCFORGE_SEED is not an unsigned integer: ") + env};
  }
  return 1;
}

nlohmann::json config_json(const SearchConfig& c) {
  nlohmann::json j = {{"population", c.population},
                      {"max_evaluations", c.max_evaluations},
                      {"max_seconds", c.max_seconds},
                      {"crossover_rate", c.crossover_rate},
                      {"repair_threshold", c.repair_threshold},
                      {"covering_bias", c.covering_bias},
                      {"insert_probability", c.insert_probability},
                      {"seed", c.seed},
                      {"min_length", c.min_length},
                      {"max_initial_length", c.max_initial_length},
                      {"max_length", c.max_length}};
  j["mutation_rate"] = c.mutation_rate ? nlohmann::json(*c.mutation_rate) : nlohmann::json("1/|statements|");
  return j;
}

std::string report_path_for(const std::string& suite_path) {
  if (suite_path == "-") return "-";
  auto dot = suite_path.rfind(".json");
  std::string stem = dot != std::string::npos && dot + 5 == suite_path.size() ? suite_path.substr(0, dot) : suite_path;
  return stem + ".report.json";
}

struct PairOpts {
  std::string program;
  std::string caller;
  std::string callee;
  bool single_method = false;
};

int cmd_analyze(const PairOpts& o, const std::string& out_path, Context& cx) {
  CompiledProgram prog = load_program(o.program, cx.manifest);
  PairAnalysis a = analyze(prog, o.caller, o.callee, o.single_method);
  cx.manifest.config = {{"caller", o.caller}, {"callee", o.callee}, {"single_method_callee", o.single_method}};
  cx.manifest.finished = report_clock();
  if (!out_path.empty()) write_json(out_path, wrap_report(cx.manifest, analysis_json(a)), cx.out);

  if (out_path != "-") {
    cx.out << "pair " << a.caller << " -> " << a.callee << " (" << to_string(a.kind) << "), tests instantiate "
           << a.test_class << "\n";
    for (const auto& t : a.targets) {
      cx.out << "site " << t.site.id << ": " << t.site.caller_method << ":" << t.site.label << " ->";
      for (const auto& c : t.site.callees) cx.out << " " << c;
      cx.out << "\n  B_R:";
      for (const auto& e : t.caller) cx.out << " " << e.describe() << ";";
      cx.out << "\n  B_E:";
      for (const auto& e : t.callee) cx.out << " " << e.describe("b") << ";";
      cx.out << "\n";
    }
    cx.out << "coupled branches: " << a.couples.size() << "\n";
    for (const auto& c : a.couples) cx.out << "  c" << c.id << " site " << c.site << ": " << couple_text(c) << "\n";
  }
  return a.couples.empty() ? kExitNoCouples : kExitOk;
}

struct GenerateOpts {
  PairOpts pair;
  std::optional<std::uint64_t> seed;
  std::int64_t budget = 10000;
  int population = 50;
  double max_seconds = 0;
  std::string out = "suite.json";
  std::string report;
  std::string traces;
};

int cmd_generate(const GenerateOpts& o, Context& cx) {
  CompiledProgram prog = load_program(o.pair.program, cx.manifest);
  PairAnalysis a = analyze(prog, o.pair.caller, o.pair.callee, o.pair.single_method);
  SearchConfig cfg;
  cfg.seed = resolve_seed(o.seed);
  cfg.max_evaluations = o.budget;
  cfg.population = o.population;
  cfg.max_seconds = o.max_seconds;
  if (auto err = validate_config(cfg)) throw Exit{kExitInput, "invalid search config: " + *err};
  cx.manifest.seed = cfg.seed;
  cx.manifest.config = config_json(cfg);
  cx.manifest.config["caller"] = o.pair.caller;
  cx.manifest.config["callee"] = o.pair.callee;

  auto [suite, report] = mosa_generate(prog, a, cfg);
  cx.manifest.finished = report_clock();
  write_json(o.out, wrap_report(cx.manifest, to_json(prog.program(), suite)), cx.out);
  write_json(o.report.empty() ? report_path_for(o.out) : o.report, wrap_report(cx.manifest, to_json(report)), cx.out);
  if (!o.traces.empty()) {
    std::vector<Trace> traces;
    for (const auto& e : suite.tests) traces.push_back(execute_test(prog, e.test));
    dump_traces(o.traces, cx.manifest, traces, cx.out);
  }
  if (report.status == SearchStatus::NoCoupledBranches) {
    cx.out << "no coupled branches for " << a.caller << " -> " << a.callee << "\n";
    return kExitNoCouples;
  }
  if (report.status == SearchStatus::NoCoveringMethods) {
    cx.out << "no covering methods for " << a.caller << " -> " << a.callee << "\n";
    return kExitNoCovering;
  }
  std::size_t covered = report.history.empty() ? 0 : report.history.back().covered;
  cx.out << "CBC: " << fixed(report.cbc.value_or(0.0)) << " (" << covered << "/" << report.couples
         << " couples), evaluations: " << report.evaluations << ", tests: " << suite.tests.size() << "\n";
  return kExitOk;
}

struct CoverOpts {
  PairOpts pair;
  std::string suite;
  std::string matching = "scoped";
  std::string out;
  std::string traces;
};

int cmd_cover(CoverOpts o, Context& cx) {
  CompiledProgram prog = load_program(o.pair.program, cx.manifest);
  auto mode = parse_cbc_matching(o.matching);
  if (!mode) throw Exit{kExitInput, "--cbc-matching must be 'scoped' or 'whole-test'"};
  TestSuite suite = load_suite(o.suite, prog.program(), cx.manifest);
  if (o.pair.caller.empty()) o.pair.caller = suite.caller;
  if (o.pair.callee.empty()) o.pair.callee = suite.callee;
  if (o.pair.caller.empty() || o.pair.callee.empty()) throw Exit{kExitInput, "--caller and --callee are required"};
  PairAnalysis a = analyze(prog, o.pair.caller, o.pair.callee, o.pair.single_method);
  cx.manifest.config = {{"caller", a.caller}, {"callee", a.callee}, {"cbc_matching", to_string(*mode)}};

  std::vector<Trace> traces;
  for (const auto& e : suite.tests) traces.push_back(execute_test(prog, e.test));
  std::optional<double> score = cbc_score(a, traces, *mode);
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream table;
  for (const auto& c : a.couples) {
    std::vector<int> by;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      if (couple_covered(a, c, traces[i], *mode)) by.push_back(static_cast<int>(i));
    }
    rows.push_back({{"id", c.id}, {"text", couple_text(c)}, {"covered", !by.empty()}, {"tests", by}});
    table << "  c" << c.id << (by.empty() ? "  uncovered  " : "  covered    ") << couple_text(c) << "\n";
  }
  cx.manifest.finished = report_clock();
  nlohmann::json payload = {{"caller", a.caller},
                            {"callee", a.callee},
                            {"cbc_matching", to_string(*mode)},
                            {"tests", suite.tests.size()},
                            {"couples", rows}};
  payload["cbc"] = score ? nlohmann::json(*score) : nlohmann::json(nullptr);
  payload["status"] = score ? "ok" : "no-coupled-branches";
  if (!o.out.empty()) write_json(o.out, wrap_report(cx.manifest, payload), cx.out);
  if (!o.traces.empty()) dump_traces(o.traces, cx.manifest, traces, cx.out);
  if (o.out != "-") {
    cx.out << "CBC (" << to_string(*mode) << "): " << (score ? fixed(*score) : std::string("n/a")) << "\n"
           << table.str();
  }
  return score ? kExitOk : kExitNoCouples;
}

struct MutateOpts {
  std::string program;
  std::string suite;
  std::string target;
  std::string operators = "all";
  std::int64_t budget = kDefaultBudget;
  std::string out;
};

int cmd_mutate(const MutateOpts& o, Context& cx) {
  CompiledProgram prog = load_program(o.program, cx.manifest);
  require_class(prog.program(), o.target);
  TestSuite suite = load_suite(o.suite, prog.program(), cx.manifest);
  std::set<std::string> ops;
  bool none = o.operators == "none";
  if (!none && o.operators != "all") {
    std::stringstream ss(o.operators);
    for (std::string op; std::getline(ss, op, ',');) {
      if (!op.empty()) ops.insert(op);
    }
  }
  std::vector<Mutant> mutants;
  if (!none) {
    try {
      mutants = generate_mutants(prog, o.target, ops);
    } catch (const Error& e) {
      throw Exit{kExitInput, e.what()};
    }
  }
  std::vector<TestCase> tests;
  for (const auto& e : suite.tests) tests.push_back(e.test);
  MutationReport r = run_mutation_analysis(prog, mutants, tests, o.budget);
  cx.manifest.config = {{"target_class", o.target}, {"operators", o.operators}, {"budget", o.budget}};
  cx.manifest.finished = report_clock();
  nlohmann::json payload = to_json(r);
  if (r.overall.total == 0) payload["score"] = nullptr;
  if (!o.out.empty()) write_json(o.out, wrap_report(cx.manifest, payload), cx.out);
  if (o.out != "-") {
    cx.out << "mutation score: " << (r.overall.total ? fixed(r.score()) : std::string("n/a")) << " ("
           << r.overall.killed << "/" << r.overall.total << " killed, " << r.overall.survived << " survived, "
           << r.overall.not_covered << " not covered)\n";
    cx.out << std::left << std::setw(24) << "operator" << std::right << std::setw(7) << "total" << std::setw(8)
           << "killed" << std::setw(10) << "survived" << std::setw(13) << "not-covered" << "\n";
    for (const auto& op : mutation_operators()) {
      const Tally& t = r.by_operator.at(op);
      if (!t.total) continue;
      cx.out << std::left << std::setw(24) << op << std::right << std::setw(7) << t.total << std::setw(8) << t.killed
             << std::setw(10) << t.survived << std::setw(13) << t.not_covered << "\n";
    }
  }
  return kExitOk;
}

struct ExportOpts {
  std::string program;
  std::string cls;
  std::string role = "plain";
  std::string paired;
  std::string out = "-";
};

int cmd_export(const ExportOpts& o, Context& cx) {
  CompiledProgram prog = load_program(o.program, cx.manifest);
  require_class(prog.program(), o.cls);
  CcfgRole role;
  if (o.role == "plain") {
    role = CcfgRole::Plain;
  } else if (o.role == "superclass-of-pair") {
    role = CcfgRole::SuperclassOfPair;
  } else if (o.role == "subclass-of-pair") {
    role = CcfgRole::SubclassOfPair;
  } else {
    throw Exit{kExitInput, "unknown role '" + o.role + "'"};
  }
  std::optional<std::string> paired;
  if (!o.paired.empty()) {
    require_class(prog.program(), o.paired);
    paired = o.paired;
  }
  try {
    write_text(o.out, build_ccfg(prog, o.cls, role, paired).to_dot(), cx.out);
  } catch (const UnknownClassError& e) {
    throw Exit{kExitUnknownClass, e.what()};
  } catch (const Error& e) {
    throw Exit{kExitInput, e.what()};
  }
  return kExitOk;
}

void add_pair(CLI::App* cmd, PairOpts& p, bool required) {
  cmd->add_option("program", p.program, "MiniOO source file")->required();
  auto* c = cmd->add_option("--caller", p.caller, "caller class");
  auto* e = cmd->add_option("--callee", p.callee, "callee class");
  if (required) {
    c->required();
    e->required();
  }
  cmd->add_flag("--single-method-callee", p.single_method, "callee targets only in the called method itself");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Class-integration test generation with coupled-branch coverage", "cbcforge"};
  app.set_version_flag("--version", std::string(CBC_VERSION));
  app.require_subcommand(1);

  PairOpts analyze_o;
  std::string analyze_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "list call sites, target branches and coupled branches");
  add_pair(analyze_cmd, analyze_o, true);
  analyze_cmd->add_option("--out", analyze_out, "write the JSON report here ('-' for stdout)");

  GenerateOpts gen_o;
  auto* gen_cmd = app.add_subcommand("generate", "search for a test suite covering the coupled branches");
  add_pair(gen_cmd, gen_o.pair, true);
  gen_cmd->add_option("--seed", gen_o.seed, "random seed (default: CBCFORGE_SEED, then 1)");
  gen_cmd->add_option("--budget-evals", gen_o.budget, "fitness evaluation budget")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--population", gen_o.population, "population size")->check(CLI::Range(2, 100000));
  gen_cmd->add_option("--max-seconds", gen_o.max_seconds, "wall-clock cap, 0 for none")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--out", gen_o.out, "suite file")->capture_default_str();
  gen_cmd->add_option("--report", gen_o.report, "search report file (default: <out>.report.json)");
  gen_cmd->add_option("--dump-traces", gen_o.traces, "write traces of the suite's tests here");

  CoverOpts cover_o;
  auto* cover_cmd = app.add_subcommand("cover", "measure the coupled-branch coverage of a suite");
  add_pair(cover_cmd, cover_o.pair, false);
  cover_cmd->add_option("suite", cover_o.suite, "suite file")->required();
  cover_cmd->add_option("--cbc-matching", cover_o.matching, "scoped or whole-test")->capture_default_str();
  cover_cmd->add_option("--out", cover_o.out, "write the JSON report here ('-' for stdout)");
  cover_cmd->add_option("--dump-traces", cover_o.traces, "write traces of the suite's tests here");

  MutateOpts mut_o;
  auto* mut_cmd = app.add_subcommand("mutate", "run differential mutation analysis of a suite");
  mut_cmd->add_option("program", mut_o.program, "MiniOO source file")->required();
  mut_cmd->add_option("suite", mut_o.suite, "suite file")->required();
  mut_cmd->add_option("--target-class", mut_o.target, "class to mutate")->required();
  mut_cmd->add_option("--operators", mut_o.operators, "comma-separated operators, 'all' or 'none'")
      ->capture_default_str();
  mut_cmd->add_option("--budget", mut_o.budget, "execution budget per test")->check(CLI::PositiveNumber);
  mut_cmd->add_option("--out", mut_o.out, "write the JSON report here ('-' for stdout)");

  ExportOpts exp_o;
  auto* ccfg_cmd = app.add_subcommand("ccfg", "class-level control flow graphs");
  ccfg_cmd->require_subcommand(1);
  auto* exp_cmd = ccfg_cmd->add_subcommand("export", "print a class CFG as DOT");
  exp_cmd->add_option("program", exp_o.program, "MiniOO source file")->required();
  exp_cmd->add_option("--class", exp_o.cls, "class")->required();
  exp_cmd->add_option("--role", exp_o.role, "plain, superclass-of-pair or subclass-of-pair")->capture_default_str();
  exp_cmd->add_option("--paired", exp_o.paired, "other class of the pair for non-plain roles");
  exp_cmd->add_option("--out", exp_o.out, "output file ('-' for stdout)")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  Context cx{out, {}};
  cx.manifest.tool_version = CBC_VERSION;
  cx.manifest.started = 0;
  try {
    cx.manifest.started = report_clock();
    if (*analyze_cmd) {
      cx.manifest.command = "analyze";
      return cmd_analyze(analyze_o, analyze_out, cx);
    }
    if (*gen_cmd) {
      cx.manifest.command = "generate";
      return cmd_generate(gen_o, cx);
    }
    if (*cover_cmd) {
      cx.manifest.command = "cover";
      return cmd_cover(cover_o, cx);
    }
    if (*mut_cmd) {
      cx.manifest.command = "mutate";
      return cmd_mutate(mut_o, cx);
    }
    cx.manifest.command = "ccfg export";
    return cmd_export(exp_o, cx);
  } catch (const Exit& e) {
    err << "cbcforge: " << e.message << "\n";
    return e.code;
  } catch (const Error& e) {
    err << "cbcforge: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace cbc
