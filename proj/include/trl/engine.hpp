#pragma once

#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "accel.hpp"
#include "rename.hpp"
#include "tp.hpp"

namespace trl {

// The TRL main loop: unroll the transition relation and all learned
// relations with an incremental solver, extract traces, learn transitive
// relations for non-redundant loops, and block re-unrolling them.

struct EngineConfig {
  long max_depth{500};
  double timeout_seconds{300.0};
  bool unsafety{false};
  long refute_step_cap{1000000};
  std::string log_path;  // JSONL event log, empty = in-memory only
  std::function<std::unique_ptr<SolverSession>()> make_session;
};

enum class VerdictKind { Safe, Unsafe, Unknown };

struct Verdict {
  VerdictKind kind{VerdictKind::Unknown};
  long depth{0};            // final value of b
  std::string reason;       // Unknown only
  std::optional<Witness> witness;  // Unsafe only
};

// pi_1 is the input relation; later entries were learned and carry the trace
// segment that induced them.
class RelationPool {
 public:
  explicit RelationPool(Formula input) {
    entries_.push_back({std::move(input), {}});
  }

  long size() const { return static_cast<long>(entries_.size()); }

  const Formula &relation(long i) const { return at(i).relation; }

  const std::vector<ProvenancedStep> &inducing_loop(long i) const {
    return at(i).loop;
  }

  void add(Formula relation, std::vector<ProvenancedStep> loop) {
    for (const auto &s : loop)
      if (s.id >= size() + 1)
        throw LogicError("inducing loop references a later pool entry");
    entries_.push_back({std::move(relation), std::move(loop)});
  }

 private:
  struct Entry {
    Formula relation;
    std::vector<ProvenancedStep> loop;
  };

  const Entry &at(long i) const {
    if (i < 1 || i > size()) throw LogicError("pool index out of range");
    return entries_[static_cast<std::size_t>(i - 1)];
  }

  std::vector<Entry> entries_;
};

struct TraceStep {
  Transition transition;
  long id{1};    // pool index sigma(x_id^(pos))
  long pos{1};   // 1-based step position
};

// Transitions observed adjacent on some trace; nodes are canonical keys.
class DependencyGraph {
 public:
  void add_edge(const std::string &from, const std::string &to) {
    edges_.insert(from + "->" + to);
  }
  bool has_edge(const std::string &from, const std::string &to) const {
    return edges_.count(from + "->" + to) != 0;
  }

 private:
  std::set<std::string> edges_;
};

class Engine {
 public:
  Engine(SafetyProblem problem, EngineConfig config = {})
      : problem_(std::move(problem)), config_(std::move(config)),
        pool_(problem_.rel) {
    problem_.validate();
    session_ = config_.make_session ? config_.make_session()
                                    : std::make_unique<EmbeddedSession>();
  }

  const std::vector<nlohmann::json> &events() const { return events_; }
  const RelationPool &pool() const { return pool_; }

  Verdict run() {
    start_ = std::chrono::steady_clock::now();
    long b = 0;
    session_->assert_formula(rename_indexed(problem_.init, problem_.vars, 1));
    for (const auto &x : problem_.vars) session_->declare(indexed(x, 1));

    while (true) {
      ++b;
      if (b > config_.max_depth) return finish(unknown(b, "depth cap reached"));
      if (elapsed() > config_.timeout_seconds)
        return finish(unknown(b, "timeout"));

      // error check: states reachable in b-1 steps
      session_->push();
      session_->assert_formula(rename_indexed(problem_.err, problem_.vars, b));
      if (session_->check_sat() == SatResult::Sat) {
        Valuation sigma = session_->get_model();
        session_->pop();
        return finish(handle_error_model(sigma, b));
      }
      session_->pop();

      session_->push();
      if (b > 1) session_->assert_formula(*transitivity_constraint(b));
      assert_unrolling(b);
      apply_blocks(b);
      event({{"event", "unroll"}, {"b", b}, {"pool", pool_.size()}});

      if (session_->check_sat() == SatResult::Unsat) {
        Verdict v;
        v.kind = VerdictKind::Safe;
        v.depth = b;
        return finish(v);
      }

      Valuation sigma = session_->get_model();
      std::vector<TraceStep> trace = compute_trace(sigma, pool_, b);
      for (std::size_t i = 0; i + 1 < trace.size(); ++i)
        graph_.add_edge(trace[i].transition.canonical_key(),
                        trace[i + 1].transition.canonical_key());

      auto loop = detect_loop(trace, graph_);
      if (!loop) continue;
      auto [s, l] = *loop;
      event({{"event", "loop-found"}, {"s", s}, {"l", l}});

      Valuation sigma_loop = compose_model(sigma, problem_.vars, s, l);
      long pick = 0;
      Valuation sigma_bar;
      if (auto red = redundancy_check(sigma_loop, pool_)) {
        pick = red->first;
        sigma_bar = red->second;
      } else {
        Formula tau_loop = loop_formula(trace, s, l);
        Formula learned = learn(tau_loop, sigma_loop);
        std::vector<ProvenancedStep> inducing;
        for (long i = s; i < s + l; ++i)
          inducing.push_back({trace[i - 1].transition, trace[i - 1].id});
        pool_.add(learned, std::move(inducing));
        pick = pool_.size();
        event({{"event", "learned"}, {"index", pick},
               {"formula", pool_.relation(pick).to_string()}});
        auto bar = complete_on(pool_.relation(pick), sigma_loop);
        if (!bar) return finish(unknown(b, "learned relation inconsistent"));
        sigma_bar = *bar;
      }

      Formula clause = blocking_clause(s, l, pool_.relation(pick), sigma_bar);
      blocked_.emplace(s + l - 1, clause);
      event({{"event", "blocked"}, {"depth", s + l - 1}, {"s", s}, {"l", l},
             {"pick", pick}, {"clause", clause.to_string()}});

      while (b >= s) {
        session_->pop();
        --b;
      }
      event({{"event", "backtrack"}, {"to", b}});
    }
  }

  // ---- pieces of the main loop, exposed for tests ----

  // trace_b(sigma, pool): one cvp per step, guided by sigma o mu_i
  static std::vector<TraceStep> compute_trace(const Valuation &sigma,
                                              const RelationPool &pool, long b,
                                              const std::vector<Var> &vars) {
    std::vector<TraceStep> trace;
    for (long i = 1; i <= b; ++i) {
      long id = to_long(sigma.get(step_id(i)));
      if (id < 1 || id > pool.size())
        throw LogicError("trace id out of pool range");
      const Formula &pi = pool.relation(id);
      Valuation nu = compose_model(sigma, vars, i, 1, extras_of(pi, vars));
      trace.push_back({cvp(pi, nu, vars), id, i});
    }
    return trace;
  }

  std::vector<TraceStep> compute_trace(const Valuation &sigma,
                                       const RelationPool &pool, long b) const {
    return compute_trace(sigma, pool, b, problem_.vars);
  }

  // minimal length, then minimal start; single learned steps are skipped
  // because learned relations are already transitive
  static std::optional<std::pair<long, long>> detect_loop(
      const std::vector<TraceStep> &trace, const DependencyGraph &graph) {
    long b = static_cast<long>(trace.size());
    for (long l = 1; l <= b; ++l) {
      for (long s = 1; s + l - 1 <= b; ++s) {
        if (l == 1 && trace[s - 1].id > 1) continue;
        if (graph.has_edge(trace[s + l - 2].transition.canonical_key(),
                           trace[s - 1].transition.canonical_key()))
          return std::make_pair(s, l);
      }
    }
    return std::nullopt;
  }

  // mu^-1_{s,l}(/\ mu_i(tau_i)): the loop body as one relational formula;
  // interior states become extra variables
  Formula loop_formula(const std::vector<TraceStep> &trace, long s,
                       long l) const {
    std::vector<Formula> kids;
    for (long i = s; i < s + l; ++i)
      kids.push_back(rename_indexed(trace[i - 1].transition.to_formula(),
                                    problem_.vars, i));
    return unrename_indexed(Formula::conj(std::move(kids)), problem_.vars, s, l);
  }

  // most recently learned relation consistent with sigma_loop, if any,
  // together with a completing model for its extras
  std::optional<std::pair<long, Valuation>> redundancy_check(
      const Valuation &sigma_loop, const RelationPool &pool) const {
    for (long i = pool.size(); i >= 2; --i) {
      auto bar = complete_on(pool.relation(i), sigma_loop);
      if (bar) return std::make_pair(i, *bar);
    }
    return std::nullopt;
  }

  std::optional<Formula> transitivity_constraint(long b) const {
    if (b <= 1) return std::nullopt;
    Term cur = Term::var(step_id(b));
    Term prev = Term::var(step_id(b - 1));
    return Formula::lit(Literal::eq(cur, Term(1))) ||
           Formula::lit(Literal::ne(cur, prev));
  }

  // mu_{s,l}(not cvp(pi, sigma_bar)), plus the id escape hatch for l = 1
  Formula blocking_clause(long s, long l, const Formula &pi,
                          const Valuation &sigma_bar) const {
    Transition proj = cvp(pi, sigma_bar, problem_.vars);
    Formula clause = rename_indexed(proj.to_formula().negate_nnf(),
                                    problem_.vars, s, l);
    if (l == 1)
      clause = clause ||
               Formula::lit(Literal::gt(Term::var(step_id(s)), Term(1)));
    return clause;
  }

 private:
  static std::set<Var> extras_of(const Formula &pi,
                                 const std::vector<Var> &vars) {
    std::set<Var> r;
    for (const auto &v : pi.variables()) {
      if (contains_var(vars, v)) continue;
      if (is_post(v) && contains_var(vars, pre_of(v))) continue;
      r.insert(v);
    }
    return r;
  }

  // sigma_loop(pi) with extras completed by the solver; nothing if
  // inconsistent
  std::optional<Valuation> complete_on(const Formula &pi,
                                       const Valuation &sigma_loop) const {
    Formula inst = pi.subst([&](const Var &v) -> Term {
      return sigma_loop.has(v) && !is_generated(v) ? Term(sigma_loop.get(v))
                                                   : Term::var(v);
    });
    auto m = solve_formula(inst);
    if (!m) return std::nullopt;
    Valuation bar = sigma_loop;
    for (const auto &v : extras_of(pi, problem_.vars))
      if (!bar.has(v)) bar.set(v, m->has(v) ? m->get(v) : Int(0));
    if (!pi.eval(bar)) throw LogicError("completion does not satisfy relation");
    return bar;
  }

  void assert_unrolling(long b) {
    for (const auto &x : problem_.vars) {
      session_->declare(indexed(x, b));
      session_->declare(indexed(x, b + 1));
    }
    session_->declare(step_id(b));
    Term id = Term::var(step_id(b));
    std::vector<Formula> disjuncts;
    for (long n = 1; n <= pool_.size(); ++n)
      disjuncts.push_back(rename_indexed(pool_.relation(n), problem_.vars, b) &&
                          Formula::lit(Literal::eq(id, Term(n))));
    session_->assert_formula(Formula::disj(std::move(disjuncts)));
    session_->assert_formula(Formula::lit(Literal::ge(id, Term(1))) &&
                             Formula::lit(Literal::le(id, Term(pool_.size()))));
  }

  void apply_blocks(long b) {
    auto [lo, hi] = blocked_.equal_range(b);
    for (auto it = lo; it != hi; ++it) session_->assert_formula(it->second);
  }

  // split disequalities by the model, then take the transitive projection
  Formula learn(const Formula &tau_loop, const Valuation &sigma_loop) const {
    Formula split = tau_loop.transform([&](const Literal &l) {
      if (l.kind() == Literal::Kind::Cmp && l.rel() == Rel::Ne) {
        const Term &t = l.term();
        if (t.eval(sigma_loop) >= 0)
          return Formula::lit(Literal::cmp(t - Term(1), Rel::Ge));
        return Formula::lit(Literal::cmp(t + Term(1), Rel::Le));
      }
      return Formula::lit(l);
    });
    return tp(Transition::of(split), sigma_loop, problem_.vars);
  }

  // the error states are reachable: §5 refutation attempt, else unknown
  Verdict handle_error_model(const Valuation &sigma, long b) {
    if (!config_.unsafety)
      return unknown(b, "error states reachable at depth " +
                            std::to_string(b - 1) + " (refutation disabled)");
    std::vector<TraceStep> trace = compute_trace(sigma, pool_, b - 1);
    std::vector<ProvenancedStep> steps;
    for (const auto &t : trace) steps.push_back({t.transition, t.id});
    std::function<const std::vector<ProvenancedStep> &(long)> loop_of =
        [&](long i) -> const std::vector<ProvenancedStep> & {
      return pool_.inducing_loop(i);
    };
    auto nodes = under_approx(steps, problem_.vars, loop_of);
    if (!nodes)
      return unknown(b, "error states reachable, acceleration failed");
    auto w = refute(problem_, *nodes, config_.refute_step_cap);
    if (!w)
      return unknown(b, "error states reachable, refutation not validated");
    Verdict v;
    v.kind = VerdictKind::Unsafe;
    v.depth = b;
    v.witness = std::move(*w);
    return v;
  }

  Verdict unknown(long b, std::string reason) const {
    Verdict v;
    v.kind = VerdictKind::Unknown;
    v.depth = b;
    v.reason = std::move(reason);
    return v;
  }

  Verdict finish(Verdict v) {
    const char *k = v.kind == VerdictKind::Safe     ? "safe"
                    : v.kind == VerdictKind::Unsafe ? "unsafe"
                                                    : "unknown";
    nlohmann::json e{{"event", "verdict"}, {"kind", k}, {"b", v.depth}};
    if (!v.reason.empty()) e["reason"] = v.reason;
    event(e);
    if (!config_.log_path.empty()) {
      std::ofstream out(config_.log_path);
      for (const auto &ev : events_) out << ev.dump() << "\n";
    }
    return v;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

  void event(nlohmann::json e) { events_.push_back(std::move(e)); }

  SafetyProblem problem_;
  EngineConfig config_;
  RelationPool pool_;
  DependencyGraph graph_;
  std::multimap<long, Formula> blocked_;
  std::unique_ptr<SolverSession> session_;
  std::vector<nlohmann::json> events_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace trl
