#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"
#include "trl/accel.hpp"

using namespace trl;

namespace {

Formula lit(const Literal &l) { return Formula::lit(l); }
Term V(const Var &v) { return Term::var(v); }

std::vector<Var> prepost(const std::vector<Var> &vars) {
  std::vector<Var> r = vars;
  for (const auto &x : vars) r.push_back(post_of(x));
  return r;
}

// relational check with implicitly existential extras: pin the state
// variables and ask the solver
bool relates(const Formula &phi, const std::vector<Var> &vars,
             const Valuation &state) {
  std::vector<Formula> kids{phi};
  for (const auto &[v, val] : state)
    kids.push_back(lit(Literal::eq(V(v), Term(val))));
  return static_cast<bool>(solve_formula(Formula::conj(kids)));
}

bool relations_equal(const Formula &a, const Formula &b,
                     const std::vector<Var> &vars, long k) {
  return oracle::for_all_valuations(prepost(vars), k, [&](const Valuation &s) {
    return relates(a, vars, s) == relates(b, vars, s);
  });
}

Formula tau_dec() {
  return Formula::conj({lit(Literal::eq(V("w'"), V("w"))),
                        lit(Literal::eq(V("w"), Term(1))),
                        lit(Literal::eq(V("x'"), V("x") - Term(1))),
                        lit(Literal::eq(V("y'"), V("y") - Term(1)))});
}

// tau_> from the two-phase system
Formula tau_gt() {
  return Formula::conj({lit(Literal::gt(V("y"), Term(0))),
                        lit(Literal::eq(V("x'"), V("x") + Term(1))),
                        lit(Literal::eq(V("y'"), V("y") - Term(1))),
                        lit(Literal::eq(V("z'"), V("z")))});
}

Formula tau_eq() {
  return Formula::conj({lit(Literal::eq(V("y"), Term(0))),
                        lit(Literal::eq(V("x'"), V("x"))),
                        lit(Literal::eq(V("y'"), V("z"))),
                        lit(Literal::eq(V("z'"), V("z")))});
}

}  // namespace

TEST_CASE("accelerate handles constant-offset loops exactly") {
  std::vector<Var> wxy{"w", "x", "y"};
  auto acc = accelerate(tau_dec(), wxy);
  REQUIRE(acc);
  Var n = fresh_extra("n");
  Formula expect = Formula::conj(
      {lit(Literal::gt(V(n), Term(0))), lit(Literal::eq(V("w"), Term(1))),
       lit(Literal::eq(V("w'"), V("w"))),
       lit(Literal::eq(V("x'"), V("x") - V(n))),
       lit(Literal::eq(V("y'"), V("y") - V(n)))});
  CHECK(relations_equal(*acc, expect, wxy, 3));
}

TEST_CASE("accelerate reproduces the two-phase forward relation") {
  std::vector<Var> xyz{"x", "y", "z"};
  auto acc = accelerate(tau_gt(), xyz);
  REQUIRE(acc);
  Var n = fresh_extra("n");
  Formula expect = Formula::conj(
      {lit(Literal::gt(V(n), Term(0))), lit(Literal::gt(V("y"), Term(0))),
       lit(Literal::eq(V("x'"), V("x") + V(n))),
       lit(Literal::eq(V("y'"), V("y") - V(n))),
       lit(Literal::eq(V("z'"), V("z"))),
       lit(Literal::ge(V("y'"), Term(0)))});
  CHECK(relations_equal(*acc, expect, xyz, 3));
}

TEST_CASE("accelerate rejects shapes outside the fragment") {
  CHECK_FALSE(accelerate(lit(Literal::eq(V("x'"), V("x") * 2)), {"x"}));
  // havocked variable
  CHECK_FALSE(accelerate(lit(Literal::ge(V("x'"), V("x"))), {"x"}));
  // guard with a disequality
  CHECK_FALSE(accelerate(lit(Literal::ne(V("x"), Term(3))) &&
                             lit(Literal::eq(V("x'"), V("x") + Term(1))),
                         {"x"}));
  // update mentioning an uneliminable extra
  CHECK_FALSE(accelerate(lit(Literal::gt(V("u"), Term(0))) &&
                             lit(Literal::eq(V("x'"), V("x") + V("u") * 2)),
                         {"x"}));
}

TEST_CASE("accelerate is exact on random constant-offset transitions") {
  oracle::Rng rng(14001);
  std::vector<Var> all{"x", "y"};
  for (int round = 0; round < 40; ++round) {
    std::size_t d = 1 + rng() % 2;
    std::vector<Var> vars(all.begin(), all.begin() + d);
    std::vector<Formula> kids;
    std::map<Var, long> off;
    for (const auto &x : vars) {
      long c = long(rng() % 5) - 2;
      off[x] = c;
      kids.push_back(lit(Literal::eq(V(post_of(x)), V(x) + Term(c))));
    }
    int ng = int(rng() % 2);
    for (int g = 0; g < ng; ++g) {
      Term t = oracle::random_term(rng, vars, 2);
      kids.push_back(lit(Literal::cmp(t, rng() % 2 ? Rel::Le : Rel::Ge)));
    }
    Formula tau = Formula::conj(kids);
    auto acc = accelerate(tau, vars);
    if (!acc) {
      // only a collapsed (unsatisfiable) guard may be rejected
      REQUIRE_FALSE(oracle::brute_sat(tau, prepost(vars), 5));
      continue;
    }

    // compare against the union of iterates 1..8 on a bounded domain
    auto iterate = [&](const Valuation &s, long k) -> std::optional<Valuation> {
      Valuation cur = s;
      for (long i = 0; i < k; ++i) {
        Valuation full = cur;
        for (const auto &x : vars)
          full.set(post_of(x), cur.get(x) + Int(off[x]));
        if (!tau.eval(full)) return std::nullopt;
        Valuation nxt;
        for (const auto &x : vars) nxt.set(x, full.get(post_of(x)));
        cur = std::move(nxt);
      }
      return cur;
    };
    oracle::for_all_valuations(vars, 3, [&](const Valuation &pre) {
      for (long k = 1; k <= 8; ++k) {
        auto post = iterate(pre, k);
        Valuation state = pre;
        bool accel_hit = false;
        if (post) {
          for (const auto &x : vars) state.set(post_of(x), post->get(x));
          accel_hit = relates(*acc, vars, state);
          REQUIRE(accel_hit);  // iterates covered (exactness, one direction)
        }
      }
      return true;
    });
    // converse: everything accel relates is some iterate
    oracle::for_all_valuations(prepost(vars), 3, [&](const Valuation &s) {
      if (!relates(*acc, vars, s)) return true;
      bool found = false;
      for (long k = 1; k <= 30 && !found; ++k) {
        auto post = iterate(s, k);
        if (!post) break;
        found = true;
        for (const auto &x : vars)
          if (post->get(x) != s.get(post_of(x))) found = false;
      }
      REQUIRE(found);
      return true;
    });
  }
}

TEST_CASE("compose chains relations with fresh intermediates") {
  std::vector<Var> xyz{"x", "y", "z"};
  // compose of tau_= and tau_>^+ matches the displayed composition
  auto tp_gt = accelerate(tau_gt(), xyz);
  REQUIRE(tp_gt);
  Formula comp = compose({tau_eq(), *tp_gt}, xyz);
  Var n = fresh_extra("n");
  Formula expect = Formula::conj(
      {lit(Literal::eq(V("y"), Term(0))), lit(Literal::gt(V(n), Term(0))),
       lit(Literal::gt(V("z"), Term(0))),
       lit(Literal::eq(V("x'"), V("x") + V(n))),
       lit(Literal::eq(V("y'"), V("z") - V(n))),
       lit(Literal::eq(V("z'"), V("z"))),
       lit(Literal::ge(V("y'"), Term(0)))});
  CHECK(relations_equal(comp, expect, xyz, 2));

  // singleton composition is the relation itself
  CHECK(relations_equal(compose({tau_eq()}, xyz), tau_eq(), xyz, 2));
}

TEST_CASE("compose agrees with the pairwise-join oracle") {
  oracle::Rng rng(14002);
  std::vector<Var> vars{"a", "b"};
  std::vector<Var> pp = prepost(vars);
  int done = 0;
  while (done < 25) {
    Formula r1 = Formula::conj({lit(oracle::random_literal(rng, pp, 2, false)),
                                lit(oracle::random_literal(rng, pp, 2, false))});
    Formula r2 = Formula::conj({lit(oracle::random_literal(rng, pp, 2, false)),
                                lit(oracle::random_literal(rng, pp, 2, false))});
    if (!oracle::brute_sat(r1, pp, 2) || !oracle::brute_sat(r2, pp, 2))
      continue;
    ++done;
    Formula comp = compose({r1, r2}, vars);
    // independent join: shared mid-state variables, solved without bounds
    Formula joined = Formula::conj(
        {r1.rename([&](const Var &v) -> Var {
           return is_post(v) ? "mid." + pre_of(v) : v;
         }),
         r2.rename([&](const Var &v) -> Var {
           return contains_var(vars, v) ? "mid." + v : v;
         })});
    oracle::for_all_valuations(pp, 2, [&](const Valuation &s) {
      REQUIRE(relates(comp, vars, s) == relates(joined, vars, s));
      return true;
    });
  }
}

TEST_CASE("under_approx keeps originals and accelerates learned steps") {
  std::vector<Var> x{"x"};
  Transition step(
      {Literal::eq(V("x'"), V("x") + Term(1))});  // cvp of the input relation
  std::vector<ProvenancedStep> loop{{step, 1}};
  std::function<const std::vector<ProvenancedStep> &(long)> loop_of =
      [&](long) -> const std::vector<ProvenancedStep> & { return loop; };

  // all-original: identity
  auto nodes = under_approx({{step, 1}, {step, 1}}, x, loop_of);
  REQUIRE(nodes);
  REQUIRE(nodes->size() == 2);
  CHECK_FALSE((*nodes)[0].accelerated);

  // learned step with inducing loop [x' = x + 1] accelerates to x' = x + n
  Transition learned({Literal::gt(V("x'"), V("x"))});
  auto nodes2 = under_approx({{learned, 2}}, x, loop_of);
  REQUIRE(nodes2);
  REQUIRE(nodes2->size() == 1);
  CHECK((*nodes2)[0].accelerated);
  Var n = fresh_extra("n");
  Formula expect = lit(Literal::gt(V(n), Term(0))) &&
                   lit(Literal::eq(V("x'"), V("x") + V(n)));
  CHECK(relations_equal((*nodes2)[0].formula, expect, x, 4));
}

TEST_CASE("refute unfolds accelerated segments into validated runs") {
  SafetyProblem p;
  p.vars = {"x"};
  p.init = lit(Literal::eq(V("x"), Term(0)));
  p.rel = lit(Literal::eq(V("x'"), V("x") + Term(1)));
  p.err = lit(Literal::ge(V("x"), Term(1000)));

  Transition step({Literal::eq(V("x'"), V("x") + Term(1))});
  std::vector<ProvenancedStep> loop{{step, 1}};
  std::function<const std::vector<ProvenancedStep> &(long)> loop_of =
      [&](long) -> const std::vector<ProvenancedStep> & { return loop; };
  Transition learned({Literal::gt(V("x'"), V("x"))});
  auto nodes = under_approx({{learned, 2}}, p.vars, loop_of);
  REQUIRE(nodes);

  auto w = refute(p, *nodes);
  REQUIRE(w);
  REQUIRE(w->states.size() == 1001);
  for (std::size_t i = 0; i < w->states.size(); ++i)
    CHECK(w->states[i][0] == Int(long(i)));

  // step cap turns oversized witnesses into a refusal
  CHECK_FALSE(refute(p, *nodes, 100));

  // unsatisfiable guard: no refutation
  SafetyProblem q = p;
  q.err = lit(Literal::le(V("x"), Term(-1)));
  CHECK_FALSE(refute(q, *nodes));
}
