#pragma once

#include <functional>
#include <optional>

#include "problem.hpp"
#include "rename.hpp"
#include "solver.hpp"
#include "transition.hpp"

namespace trl {

// Unsafety refutation: acceleration of constant-offset loops, relational
// composition, and under-approximation of traces guided by the recorded
// provenance of learned relations.

// One trace step together with the pool index of the relation it was
// projected from; id 1 marks the input transition relation.
struct ProvenancedStep {
  Transition transition;
  long id{1};
};

namespace detail {

// Substitute away every variable outside keep that has a defining equality
// with unit coefficient. Returns nothing when some outside variable remains.
inline std::optional<std::vector<Literal>> propagate_equalities(
    const Formula &phi, const std::set<Var> &keep) {
  std::vector<Literal> lits;
  try {
    lits = phi.conjuncts();
  } catch (const LogicError &) {
    return std::nullopt;
  }
  while (true) {
    std::optional<Var> target;
    for (const auto &l : lits)
      for (const auto &[v, c] : l.term().coeffs())
        if (!keep.count(v) && !target) target = v;
    if (!target) return lits;

    bool done = false;
    for (std::size_t i = 0; i < lits.size() && !done; ++i) {
      const Literal &l = lits[i];
      if (l.kind() != Literal::Kind::Cmp || l.rel() != Rel::Eq) continue;
      Int c = l.term().coeff(*target);
      if (c != 1 && c != -1) continue;
      Term def = (l.term() - Term::var(*target, c)) * (-c);
      std::vector<Literal> out;
      for (std::size_t j = 0; j < lits.size(); ++j) {
        if (j == i) continue;
        Literal s = lits[j].subst_var(*target, def);
        if (s.is_tt()) continue;
        out.push_back(std::move(s));
      }
      lits = std::move(out);
      done = true;
    }
    if (!done) return std::nullopt;  // no defining equality for target
  }
}

}  // namespace detail

// Exact acceleration of the constant-offset fragment: after equality
// propagation the relation must have the shape G(x) /\ (x' = x + c_x for all
// x), with G a conjunction of comparisons over pre-variables. The result
//   n > 0 /\ (x' = x + n*c_x) /\ G(x) /\ G(x + (n-1)*c)
// characterizes the transitive closure exactly: each guard term changes by a
// constant per step, so holding at the first and last iteration implies
// holding throughout. Anything else returns nothing.
inline std::optional<Formula> accelerate(const Formula &tau,
                                         const std::vector<Var> &vars) {
  std::set<Var> keep;
  for (const auto &x : vars) {
    keep.insert(x);
    keep.insert(post_of(x));
  }
  auto lits = detail::propagate_equalities(tau, keep);
  if (!lits) return std::nullopt;

  std::map<Var, Int> offset;  // pre var -> constant per-step change
  std::map<Var, Int> resets;  // pre var -> constant it is reset to
  std::vector<Literal> guards;
  for (const auto &l : *lits) {
    bool has_post = false;
    for (const auto &[v, c] : l.term().coeffs())
      if (is_post(v)) has_post = true;
    if (!has_post) {
      // guard: first/last-iteration checks need monotone interpolation, so
      // only plain comparisons qualify
      if (l.kind() != Literal::Kind::Cmp || l.rel() == Rel::Ne)
        return std::nullopt;
      guards.push_back(l);
      continue;
    }
    // update: x' - x - c = 0 up to sign
    if (l.kind() != Literal::Kind::Cmp || l.rel() != Rel::Eq)
      return std::nullopt;
    if (l.term().coeffs().size() > 2) return std::nullopt;
    Var post;
    for (const auto &[v, c] : l.term().coeffs())
      if (is_post(v)) post = v;
    Var x = pre_of(post);
    Int cp = l.term().coeff(post);
    if (cp != 1 && cp != -1) return std::nullopt;
    Term rest = (l.term() - Term::var(post, cp)) * (-cp);  // x' = rest
    Int c;
    if (rest.coeffs().empty()) {
      // constant reset x' = k: offset 0, provided the guard pins x = k
      resets[x] = rest.constant();
      c = 0;
    } else {
      if (rest.coeffs().size() != 1 || rest.coeff(x) != 1) return std::nullopt;
      c = rest.constant();
    }
    auto it = offset.find(x);
    if (it != offset.end() && it->second != c) return std::nullopt;
    offset[x] = c;
  }
  for (const auto &x : vars)
    if (!offset.count(x)) return std::nullopt;
  for (const auto &[x, k] : resets) {
    bool pinned = false;
    Term want = Term::var(x) - Term(k);
    for (const auto &g : guards)
      if (g.rel() == Rel::Eq && (g.term() == want || g.term() == -want))
        pinned = true;
    if (!pinned) return std::nullopt;
  }

  Var n = fresh_extra("n");
  std::vector<Formula> kids;
  kids.push_back(Formula::lit(Literal::gt(Term::var(n), Term(0))));
  for (const auto &x : vars)
    kids.push_back(Formula::lit(Literal::eq(
        Term::var(post_of(x)), Term::var(x) + Term::var(n, offset[x]))));
  for (const auto &g : guards) {
    kids.push_back(Formula::lit(g));
    // G(x + (n-1)*c): the guard term gains S*(n-1) where S = sum a_x * c_x
    Int s = 0;
    for (const auto &[v, a] : g.term().coeffs()) s += a * offset[v];
    if (s == 0) continue;
    Term shifted = g.term() + Term::var(n, s) - Term(s);
    kids.push_back(Formula::lit(Literal::cmp(std::move(shifted), g.rel())));
  }
  return Formula::conj(std::move(kids));
}

// Relational composition: chain the formulas with fresh intermediate state
// variables and rename every extra apart. No quantifier elimination.
inline Formula compose(const std::vector<Formula> &rhos,
                       const std::vector<Var> &vars) {
  if (rhos.empty()) throw LogicError("compose of an empty sequence");
  std::vector<std::map<Var, Var>> link(rhos.size() - 1);
  for (std::size_t i = 0; i + 1 < rhos.size(); ++i)
    for (const auto &x : vars) link[i][x] = fresh_extra(x + ".k");

  std::vector<Formula> kids;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    std::map<Var, Var> fresh;  // extras renamed apart per step
    kids.push_back(rhos[i].rename([&](const Var &v) -> Var {
      if (contains_var(vars, v)) return i == 0 ? v : link[i - 1].at(v);
      if (is_post(v) && contains_var(vars, pre_of(v)))
        return i + 1 == rhos.size() ? v : link[i].at(pre_of(v));
      auto it = fresh.find(v);
      if (it == fresh.end()) it = fresh.emplace(v, fresh_extra(v)).first;
      return it->second;
    }));
  }
  return Formula::conj(std::move(kids));
}

// One node of the under-approximation: either an original transition kept
// verbatim, or an accelerated loop with the body retained for witness
// unfolding.
struct UaNode {
  Formula formula;  // relational formula over vars (plus extras)
  bool accelerated{false};
  Var counter;               // the acceleration counter, if accelerated
  std::vector<UaNode> body;  // one loop iteration, if accelerated
};

// ua per §-recursion: originals stay, learned steps become the acceleration
// of the under-approximated inducing loop. loop_of maps a pool index (> 1)
// to the recorded loop that induced it; recursion terminates because loops
// only reference earlier pool entries.
inline std::optional<std::vector<UaNode>> under_approx(
    const std::vector<ProvenancedStep> &steps, const std::vector<Var> &vars,
    const std::function<const std::vector<ProvenancedStep> &(long)> &loop_of) {
  std::vector<UaNode> nodes;
  for (const auto &s : steps) {
    if (s.id == 1) {
      nodes.push_back({s.transition.to_formula(), false, {}, {}});
      continue;
    }
    auto body = under_approx(loop_of(s.id), vars, loop_of);
    if (!body) return std::nullopt;
    std::vector<Formula> parts;
    for (const auto &n : *body) parts.push_back(n.formula);
    auto acc = accelerate(compose(parts, vars), vars);
    if (!acc) return std::nullopt;
    // the counter is the only variable of the accelerated formula that is
    // not a pre/post state variable
    Var counter;
    for (const auto &v : acc->variables())
      if (is_generated(v)) counter = v;
    nodes.push_back({*acc, true, counter, std::move(*body)});
  }
  return nodes;
}

// Concrete run: a sequence of states, first initial, last an error state.
struct Witness {
  std::vector<std::vector<Int>> states;
};

namespace detail {

struct Unfolder {
  const std::vector<Var> &vars;
  long budget;  // remaining steps

  std::optional<Valuation> pin_solve(const Formula &phi,
                                     const std::vector<Int> &pre,
                                     const std::vector<Int> *post) {
    std::vector<Formula> kids{phi};
    for (std::size_t i = 0; i < vars.size(); ++i) {
      kids.push_back(Formula::lit(Literal::eq(Term::var(vars[i]), Term(pre[i]))));
      if (post)
        kids.push_back(Formula::lit(
            Literal::eq(Term::var(post_of(vars[i])), Term((*post)[i]))));
    }
    return solve_formula(Formula::conj(std::move(kids)));
  }

  std::vector<Int> read_state(const Valuation &m, const std::vector<Var> &names) {
    std::vector<Int> s;
    for (const auto &v : names) s.push_back(m.has(v) ? m.get(v) : Int(0));
    return s;
  }

  // Append the intermediate and final states of one pass through the node
  // sequence from state pre to state post.
  bool unfold_seq(const std::vector<UaNode> &nodes, const std::vector<Int> &pre,
                  const std::vector<Int> &post,
                  std::vector<std::vector<Int>> &out) {
    // chain with explicit boundary variables so the model exposes them
    std::vector<Formula> kids;
    std::vector<std::vector<Var>> bound(nodes.size() + 1);
    for (std::size_t i = 0; i <= nodes.size(); ++i)
      for (const auto &x : vars) bound[i].push_back(indexed(x, long(i) + 1));
    for (std::size_t i = 0; i < nodes.size(); ++i)
      kids.push_back(nodes[i].formula.rename([&](const Var &v) -> Var {
        if (contains_var(vars, v)) return indexed(v, long(i) + 1);
        if (is_post(v) && contains_var(vars, pre_of(v)))
          return indexed(pre_of(v), long(i) + 2);
        return v;  // extras are globally fresh already
      }));
    for (std::size_t i = 0; i < vars.size(); ++i) {
      kids.push_back(Formula::lit(Literal::eq(Term::var(bound[0][i]), Term(pre[i]))));
      kids.push_back(Formula::lit(
          Literal::eq(Term::var(bound[nodes.size()][i]), Term(post[i]))));
    }
    auto m = solve_formula(Formula::conj(std::move(kids)));
    if (!m) return false;

    std::vector<Int> cur = pre;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::vector<Int> next = read_state(*m, bound[i + 1]);
      if (!unfold_node(nodes[i], cur, next, *m,
                       nodes[i].accelerated && m->has(nodes[i].counter)
                           ? std::optional<Int>(m->get(nodes[i].counter))
                           : std::nullopt,
                       out))
        return false;
      cur = std::move(next);
    }
    return true;
  }

  bool unfold_node(const UaNode &node, const std::vector<Int> &pre,
                   const std::vector<Int> &post, const Valuation &outer,
                   std::optional<Int> counter_hint,
                   std::vector<std::vector<Int>> &out) {
    if (!node.accelerated) {
      if (--budget < 0) return false;
      out.push_back(post);
      return true;
    }
    Int n = 0;
    if (counter_hint) {
      n = *counter_hint;
    } else {
      auto m = pin_solve(node.formula, pre, &post);
      if (!m || !m->has(node.counter)) return false;
      n = m->get(node.counter);
    }
    if (n < 1) return false;
    std::vector<Int> cur = pre;
    for (Int t = 1; t <= n; ++t) {
      if (budget < long(node.body.size())) return false;
      // the accelerated fragment has deterministic updates, so solving one
      // iteration with the pre-state pinned lands on the unique next state
      std::vector<Formula> kids;
      for (const auto &b : node.body) kids.push_back(b.formula);
      Formula step = compose(kids, vars);
      auto m = pin_solve(step, cur, t == n ? &post : nullptr);
      if (!m) return false;
      std::vector<Var> postnames;
      for (const auto &x : vars) postnames.push_back(post_of(x));
      std::vector<Int> next = read_state(*m, postnames);
      if (!unfold_seq(node.body, cur, next, out)) return false;
      cur = std::move(next);
    }
    return cur == post;
  }
};

}  // namespace detail

// Refutation: if init /\ ua-chain /\ err is satisfiable, unfold the chain
// into an explicit run and validate it by replay. The step cap bounds the
// total unfolded length.
inline std::optional<Witness> refute(const SafetyProblem &problem,
                                     const std::vector<UaNode> &nodes,
                                     long step_cap = 1000000) {
  const auto &vars = problem.vars;
  std::vector<Formula> kids;
  kids.push_back(problem.init.rename(
      [&](const Var &v) { return indexed(v, 1); }));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    kids.push_back(nodes[i].formula.rename([&](const Var &v) -> Var {
      if (contains_var(vars, v)) return indexed(v, long(i) + 1);
      if (is_post(v) && contains_var(vars, pre_of(v)))
        return indexed(pre_of(v), long(i) + 2);
      return v;
    }));
  kids.push_back(problem.err.rename(
      [&](const Var &v) { return indexed(v, long(nodes.size()) + 1); }));
  auto m = solve_formula(Formula::conj(std::move(kids)));
  if (!m) return std::nullopt;

  detail::Unfolder uf{vars, step_cap};
  std::vector<std::vector<Int>> states;
  std::vector<Int> first, last;
  for (const auto &x : vars) {
    Var v1 = indexed(x, 1), v2 = indexed(x, long(nodes.size()) + 1);
    first.push_back(m->has(v1) ? m->get(v1) : Int(0));
    last.push_back(m->has(v2) ? m->get(v2) : Int(0));
  }
  states.push_back(first);
  if (!nodes.empty() && !uf.unfold_seq(nodes, first, last, states))
    return std::nullopt;

  // validate by replay against the original problem
  auto bind = [&](const std::vector<Int> &s) {
    Valuation nu;
    for (std::size_t i = 0; i < vars.size(); ++i) nu.set(vars[i], s[i]);
    return nu;
  };
  if (!problem.init.eval(bind(states.front()))) return std::nullopt;
  if (!problem.err.eval(bind(states.back()))) return std::nullopt;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    std::vector<Formula> step{problem.rel};
    for (std::size_t k = 0; k < vars.size(); ++k) {
      step.push_back(Formula::lit(
          Literal::eq(Term::var(vars[k]), Term(states[i][k]))));
      step.push_back(Formula::lit(
          Literal::eq(Term::var(post_of(vars[k])), Term(states[i + 1][k]))));
    }
    if (!solve_formula(Formula::conj(std::move(step)))) return std::nullopt;
  }
  return Witness{std::move(states)};
}

}  // namespace trl
