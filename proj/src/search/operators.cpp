#include "cbc/search/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cbc/errors.hpp"
#include "cbc/lang/resolve.hpp"

namespace cbc {

std::optional<std::string> validate_config(const SearchConfig& c) {
  auto rate = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (c.population < 2) return "population must be at least 2";
  if (c.max_evaluations < 0) return "evaluation budget must not be negative";
  if (c.max_seconds < 0) return "time budget must not be negative";
  if (!rate(c.crossover_rate) || !rate(c.covering_bias) || !rate(c.insert_probability)) {
    return "rates must lie in [0, 1]";
  }
  if (c.mutation_rate && !rate(*c.mutation_rate)) return "mutation rate must lie in [0, 1]";
  if (c.repair_threshold < 1) return "repair threshold must be positive";
  if (c.min_length < 1 || c.min_length > c.max_initial_length || c.max_initial_length > c.max_length) {
    return "length bounds must satisfy 1 <= min <= initial max <= hard max";
  }
  if (c.max_object_depth < 0) return "object depth must not be negative";
  return std::nullopt;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == UINT64_MAX) return static_cast<std::int64_t>(gen_());
  std::uint64_t n = span + 1;
  // Rejection keeps the draw exactly uniform.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do x = gen_();
  while (x >= limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % n);
}

double Rng::unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

namespace {

constexpr std::int64_t kIntPool[] = {-100, -1, 0, 1, 42, 100, 101};

bool callable(const MethodDef* m) {
  return !m->is_ctor && !m->is_abstract && m->visibility != Visibility::Private;
}

// Every statement reference, receiver included.
template <class F>
void for_each_ref(Statement& s, F f) {
  if (s.kind == Statement::Kind::Invoke) f(s.receiver);
  for (auto& a : s.args) {
    if (a.kind == Arg::Kind::Ref) f(a.ref);
  }
}

int insert_stmt(TestCase& t, int& pos, Statement s) {
  t.stmts.insert(t.stmts.begin() + pos, std::move(s));
  for (std::size_t j = pos + 1; j < t.stmts.size(); ++j) {
    for_each_ref(t.stmts[j], [&](int& r) {
      if (r >= pos) ++r;
    });
  }
  return pos++;
}

}  // namespace

struct TestFactory::Piece {
  const TestCase* src;
  int source;
  int begin;
  int end;
};

TestFactory::TestFactory(const CompiledProgram& prog, const PairAnalysis& pair, SearchConfig config)
    : prog_(&prog), program_(&prog.program()), config_(config), test_class_(pair.test_class),
      covering_(pair.covering) {
  if (auto err = validate_config(config_)) throw Error("invalid search config: " + *err);
  if (covering_.empty()) throw Error("pair untestable via caller: no covering methods");
  const ClassDef& cls = program_->get_class(test_class_);
  if (!is_instantiable(*program_, test_class_) || (cls.ctor() && cls.ctor()->visibility == Visibility::Private)) {
    throw Error("class '" + test_class_ + "' cannot be instantiated by a test");
  }
  auto covers = [&](const std::string& key) {
    return std::find(covering_.begin(), covering_.end(), key) != covering_.end();
  };
  ctor_covers_ = cls.ctor() && covers(cls.ctor()->key());
  for (const MethodDef* m : visible_methods(*program_, test_class_)) {
    if (!callable(m)) continue;
    (covers(m->key()) ? cover_defs_ : other_defs_).push_back(m);
  }
  if (cover_defs_.empty() && !ctor_covers_) throw Error("pair untestable via caller: no callable covering method");
}

bool TestFactory::is_covering(const TestCase& t, int i) const {
  const Statement& s = t.stmts[i];
  if (s.kind == Statement::Kind::Construct) return ctor_covers_ && s.class_name == test_class_;
  if (s.kind != Statement::Kind::Invoke) return false;
  const MethodDef* m = invoked_method(*program_, t, i);
  return m && std::find(covering_.begin(), covering_.end(), m->key()) != covering_.end();
}

bool TestFactory::has_covering_call(const TestCase& t) const {
  for (int i = 0; i < static_cast<int>(t.stmts.size()); ++i) {
    if (is_covering(t, i)) return true;
  }
  return false;
}

std::int64_t TestFactory::random_int(Rng& rng) const {
  if (rng.chance(0.5)) return kIntPool[rng.index(std::size(kIntPool))];
  return rng.between(-1000, 1000);
}

int TestFactory::ensure_object(TestCase& t, int& pos, const std::string& cls, Rng& rng, int depth) const {
  std::vector<Arg> args;
  if (const MethodDef* ctor = program_->get_class(cls).ctor()) args = random_args(t, pos, ctor->params, rng, depth + 1);
  return insert_stmt(t, pos, Statement::construct(cls, std::move(args)));
}

Arg TestFactory::random_arg(TestCase& t, int& pos, const Type& want, Rng& rng, int depth) const {
  switch (want.base) {
    case BaseType::Int: return Arg::int_lit(random_int(rng));
    case BaseType::Bool: return Arg::bool_lit(rng.chance(0.5));
    case BaseType::Ref: break;
    default: return Arg::null_lit();
  }
  std::vector<int> vars;
  for (int j = 0; j < pos; ++j) {
    Type ty = statement_type(*program_, t, j);
    if (ty.is_ref() && assignable(*program_, want, ty)) vars.push_back(j);
  }
  if (!vars.empty() && rng.chance(0.5)) return Arg::var(vars[rng.index(vars.size())]);
  std::vector<std::string> classes;
  for (const auto& c : subtree(*program_, want.class_name)) {
    const MethodDef* ctor = program_->get_class(c).ctor();
    if (is_instantiable(*program_, c) && !(ctor && ctor->visibility == Visibility::Private)) classes.push_back(c);
  }
  if (classes.empty() || depth >= config_.max_object_depth || rng.chance(0.1)) {
    if (!vars.empty()) return Arg::var(vars[rng.index(vars.size())]);
    return Arg::null_lit();
  }
  return Arg::var(ensure_object(t, pos, classes[rng.index(classes.size())], rng, depth));
}

std::vector<Arg> TestFactory::random_args(TestCase& t, int& pos, const std::vector<Param>& params, Rng& rng,
                                          int depth) const {
  std::vector<Arg> out;
  for (const auto& p : params) out.push_back(random_arg(t, pos, p.type, rng, depth));
  return out;
}

bool TestFactory::insert_call(TestCase& t, Rng& rng) const {
  bool covering = !cover_defs_.empty() && (other_defs_.empty() || rng.chance(config_.covering_bias));
  const auto& pool = covering ? cover_defs_ : other_defs_;
  if (pool.empty()) return false;
  place_call(t, pool[rng.index(pool.size())], rng);
  return covering;
}

void TestFactory::place_call(TestCase& t, const MethodDef* m, Rng& rng) const {
  int pos = static_cast<int>(rng.between(0, static_cast<std::int64_t>(t.stmts.size())));
  std::vector<int> receivers;
  Type want = Type::ref(test_class_);
  for (int j = 0; j < pos; ++j) {
    const Statement& s = t.stmts[j];
    if (s.kind == Statement::Kind::Construct && assignable(*program_, want, Type::ref(s.class_name))) {
      receivers.push_back(j);
    }
  }
  int recv = receivers.empty() || rng.chance(0.1) ? ensure_object(t, pos, test_class_, rng, 0)
                                                  : receivers[rng.index(receivers.size())];
  std::vector<Arg> args = random_args(t, pos, m->params, rng, 0);
  insert_stmt(t, pos, Statement::invoke(recv, m->name, std::move(args)));
}

TestCase TestFactory::random_test(Rng& rng) const {
  TestCase t;
  int pos = 0;
  ensure_object(t, pos, test_class_, rng, 0);
  auto target = static_cast<std::size_t>(rng.between(config_.min_length, config_.max_initial_length));
  while (t.stmts.size() < target) {
    if (!insert_call(t, rng)) break;
  }
  // Every call missed the covering methods; add one.
  if (!has_covering_call(t)) place_call(t, cover_defs_[rng.index(cover_defs_.size())], rng);
  return t;
}

TestCase TestFactory::rebuild(const std::vector<Piece>& pieces) const {
  TestCase out;
  std::map<int, std::map<int, int>> where;  // source -> old index -> new index
  for (const Piece& p : pieces) {
    for (int j = p.begin; j < p.end; ++j) {
      Statement s = p.src->stmts[j];
      int here = static_cast<int>(out.stmts.size());
      bool ok = true;
      for_each_ref(s, [&](int& r) {
        if (!ok) return;
        auto& m = where[p.source];
        if (auto it = m.find(r); it != m.end() && it->second >= 0) {
          r = it->second;
          return;
        }
        Type need = statement_type(*program_, *p.src, r);
        auto fits = [&](int n) {
          if (n < 0 || n >= here) return false;
          Type got = statement_type(*program_, out, n);
          return got.is_ref() && assignable(*program_, need, got);
        };
        // Same relative position first, then the nearest earlier value.
        int aligned = r + (here - j);
        if (fits(aligned)) {
          r = aligned;
          return;
        }
        for (int n = here - 1; n >= 0; --n) {
          if (fits(n)) {
            r = n;
            return;
          }
        }
        ok = false;
      });
      where[p.source][j] = ok ? here : -1;
      if (ok) out.stmts.push_back(std::move(s));
    }
  }
  return out;
}

TestCase TestFactory::remove_statement(const TestCase& t, int i) const {
  int n = static_cast<int>(t.stmts.size());
  return rebuild({{&t, 0, 0, i}, {&t, 0, i + 1, n}});
}

std::pair<TestCase, TestCase> TestFactory::crossover(const TestCase& p1, const TestCase& p2, Rng& rng,
                                                     RepairStats* stats) const {
  int n1 = static_cast<int>(p1.stmts.size());
  int n2 = static_cast<int>(p2.stmts.size());
  double alpha = rng.unit();
  int c1 = static_cast<int>(std::lround(alpha * n1));
  int c2 = static_cast<int>(std::lround(alpha * n2));
  TestCase a = rebuild({{&p1, 0, 0, c1}, {&p2, 1, c2, n2}});
  TestCase b = rebuild({{&p2, 1, 0, c2}, {&p1, 0, c1, n1}});
  auto settle = [&](TestCase& child, const TestCase& parent) {
    if (stats) ++stats->crossover_children;
    if (static_cast<int>(child.stmts.size()) > config_.max_length || !has_covering_call(child)) {
      child = parent;
      if (stats) ++stats->crossover_replaced;
    }
  };
  settle(a, p1);
  settle(b, p2);
  return {std::move(a), std::move(b)};
}

bool TestFactory::mutate_statement(TestCase& t, int i, Rng& rng) const {
  Statement& s = t.stmts[i];
  std::vector<int> literals;
  for (int k = 0; k < static_cast<int>(s.args.size()); ++k) {
    auto kind = s.args[k].kind;
    if (kind == Arg::Kind::Int || kind == Arg::Kind::Bool) literals.push_back(k);
  }
  bool assign_lit = s.kind == Statement::Kind::Assign && s.literal.kind != Arg::Kind::Null;

  std::vector<int> receivers;
  std::vector<const MethodDef*> methods;
  if (s.kind == Statement::Kind::Invoke) {
    Type recv = statement_type(*program_, t, s.receiver);
    for (int j = 0; j < i; ++j) {
      Type ty = statement_type(*program_, t, j);
      if (j != s.receiver && ty.is_ref() && assignable(*program_, recv, ty)) receivers.push_back(j);
    }
    const MethodDef* cur = invoked_method(*program_, t, i);
    for (const MethodDef* m : visible_methods(*program_, recv.class_name)) {
      if (callable(m) && m->name != s.method && cur && m->return_type == cur->return_type) methods.push_back(m);
    }
  }

  enum Op { Literal, Receiver, Method, Delete };
  std::vector<Op> ops;
  if (!literals.empty() || assign_lit) ops.push_back(Literal);
  if (!receivers.empty()) ops.push_back(Receiver);
  if (!methods.empty()) ops.push_back(Method);
  ops.push_back(Delete);

  switch (ops[rng.index(ops.size())]) {
    case Literal: {
      Arg& a = assign_lit ? s.literal : s.args[literals[rng.index(literals.size())]];
      if (a.kind == Arg::Kind::Bool) {
        a.value = !a.value;
      } else if (rng.chance(0.5)) {
        a.value = random_int(rng);
      } else {
        std::int64_t delta = rng.between(1, 10);
        a.value = rng.chance(0.5) ? static_cast<std::int64_t>(static_cast<std::uint64_t>(a.value) + delta)
                                  : static_cast<std::int64_t>(static_cast<std::uint64_t>(a.value) - delta);
      }
      return true;
    }
    case Receiver:
      s.receiver = receivers[rng.index(receivers.size())];
      return true;
    case Method: {
      const MethodDef* m = methods[rng.index(methods.size())];
      int recv = s.receiver;
      int pos = i;
      std::vector<Arg> args = random_args(t, pos, m->params, rng, 0);
      t.stmts[pos] = Statement::invoke(recv, m->name, std::move(args));
      return true;
    }
    case Delete:
      t = remove_statement(t, i);
      return true;
  }
  return false;
}

std::optional<TestCase> TestFactory::mutate(const TestCase& t, Rng& rng, RepairStats* stats) const {
  TestCase m = t;
  double rate = config_.mutation_rate.value_or(t.stmts.empty() ? 1.0 : 1.0 / static_cast<double>(t.stmts.size()));
  for (int i = static_cast<int>(m.stmts.size()) - 1; i >= 0; --i) {
    if (i < static_cast<int>(m.stmts.size()) && rng.chance(rate)) mutate_statement(m, i, rng);
  }
  if (static_cast<int>(m.stmts.size()) < config_.max_length && rng.chance(config_.insert_probability)) {
    insert_call(m, rng);
  }
  if (stats) ++stats->mutations;
  auto fine = [&](const TestCase& c) {
    return has_covering_call(c) && static_cast<int>(c.stmts.size()) <= config_.max_length;
  };
  if (fine(m)) return m;
  if (stats) ++stats->repairs_started;
  for (int attempt = 0; attempt < config_.repair_threshold; ++attempt) {
    if (stats) ++stats->repair_attempts;
    TestCase r = m;
    insert_call(r, rng);
    if (fine(r)) {
      if (stats) ++stats->repairs_succeeded;
      return r;
    }
  }
  if (stats) ++stats->repairs_abandoned;
  return std::nullopt;
}

}  // namespace cbc
