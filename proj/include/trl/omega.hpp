#pragma once

#include <optional>
#include <vector>

#include "term.hpp"

namespace trl {

// Feasibility over the integers for conjunctions of linear equalities and
// inequalities (Omega test: equality elimination in the style of Pugh, then
// Fourier-Motzkin with dark-shadow tightening and splinters). Returns a
// model on success.

class ResourceLimit : public std::runtime_error {
 public:
  explicit ResourceLimit(const std::string &msg) : std::runtime_error(msg) {}
};

namespace detail {

inline Int eval_or_zero(const Term &t, const Valuation &m) {
  Int r = t.constant();
  for (const auto &[v, cv] : t.coeffs())
    if (m.has(v)) r += cv * m.get(v);
  return r;
}

struct SubstStep {
  Var v;
  Term t;
};

struct PickStep {
  Var v;
  std::vector<Term> bounds;  // the t >= 0 constraints mentioning v
};

struct Step {
  bool is_subst;
  SubstStep subst;
  PickStep pick;
};

class OmegaSolver {
 public:
  explicit OmegaSolver(long budget) : budget_(budget) {}

  // eqs: t = 0, ineqs: t >= 0
  std::optional<Valuation> solve(std::vector<Term> eqs,
                                 std::vector<Term> ineqs) {
    stack_.clear();
    if (!solve_rec(std::move(eqs), std::move(ineqs))) return std::nullopt;
    Valuation m;
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      if (it->is_subst) {
        m.set(it->subst.v, eval_or_zero(it->subst.t, m));
      } else {
        m.set(it->pick.v, pick_value(it->pick, m));
      }
    }
    return m;
  }

 private:
  // on failure the resolution stack is restored to its entry state
  bool solve_rec(std::vector<Term> eqs, std::vector<Term> ineqs) {
    if (budget_-- <= 0) throw ResourceLimit("omega budget exhausted");
    std::size_t mark = stack_.size();
    bool ok = solve_inner(std::move(eqs), std::move(ineqs));
    if (!ok) stack_.resize(mark);
    return ok;
  }

  bool solve_inner(std::vector<Term> eqs, std::vector<Term> ineqs) {
    if (!normalize(eqs, ineqs)) return false;
    if (!eqs.empty()) return eliminate_equality(std::move(eqs), std::move(ineqs));
    if (ineqs.empty()) return true;
    return eliminate_inequality(std::move(ineqs));
  }

  // gcd-tighten, drop trivially true constraints, detect constant conflicts
  static bool normalize(std::vector<Term> &eqs, std::vector<Term> &ineqs) {
    std::vector<Term> es, is;
    for (auto &t : eqs) {
      if (t.is_constant()) {
        if (t.constant() != 0) return false;
        continue;
      }
      Int g = t.coeff_gcd();
      if (!divides(g, t.constant())) return false;
      if (g > 1) t = scaled(t, g, /*tighten_floor=*/false);
      es.push_back(std::move(t));
    }
    for (auto &t : ineqs) {
      if (t.is_constant()) {
        if (t.constant() < 0) return false;
        continue;
      }
      Int g = t.coeff_gcd();
      if (g > 1) t = scaled(t, g, /*tighten_floor=*/true);
      is.push_back(std::move(t));
    }
    eqs = std::move(es);
    ineqs = std::move(is);
    return true;
  }

  // divide coefficients by g; inequalities t >= 0 keep floor(c/g)
  static Term scaled(const Term &t, const Int &g, bool tighten_floor) {
    Term u;
    for (const auto &[v, cv] : t.coeffs()) u += Term::var(v, cv / g);
    u += Term(tighten_floor ? floor_div(t.constant(), g) : t.constant() / g);
    return u;
  }

  bool eliminate_equality(std::vector<Term> eqs, std::vector<Term> ineqs) {
    // equality and variable with the smallest absolute coefficient
    std::size_t best_i = 0;
    Var best_v;
    Int best_a = 0;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      for (const auto &[v, cv] : eqs[i].coeffs()) {
        Int a = abs(cv);
        if (best_a == 0 || a < best_a) {
          best_a = a;
          best_i = i;
          best_v = v;
        }
      }
    }
    const Term &eq = eqs[best_i];
    const Var &x = best_v;
    Int a = eq.coeff(x);

    if (best_a == 1) {
      // x = -a * (eq - a*x): unit coefficient, direct substitution
      Term rest = eq - Term::var(x, a);
      Term def = rest * (-a);
      push_subst(x, def);
      eqs.erase(eqs.begin() + static_cast<long>(best_i));
      apply_subst(eqs, x, def);
      apply_subst(ineqs, x, def);
      if (solve_rec(std::move(eqs), std::move(ineqs))) return true;
      stack_.pop_back();
      return false;
    }

    // |a| >= 2: symmetric-modulus reduction with a fresh variable; the
    // rewritten equality keeps shrinking, so this terminates
    Int m = best_a + 1;
    Int sign = a > 0 ? 1 : -1;
    Var s = fresh_extra(".o");
    Term def;  // x = sign * (sum smod(a_i,m) x_i + smod(c,m) - m*s)
    for (const auto &[v, cv] : eq.coeffs())
      if (v != x) def += Term::var(v, sym_mod(cv, m));
    def += Term(sym_mod(eq.constant(), m));
    def -= Term::var(s, m);
    def *= sign;
    push_subst(x, def);
    apply_subst(eqs, x, def);
    apply_subst(ineqs, x, def);
    if (solve_rec(std::move(eqs), std::move(ineqs))) return true;
    stack_.pop_back();
    return false;
  }

  bool eliminate_inequality(std::vector<Term> ineqs) {
    // variable with the fewest lower*upper resolvent pairs
    std::map<Var, std::pair<long, long>> counts;
    for (const auto &t : ineqs)
      for (const auto &[v, cv] : t.coeffs())
        (cv > 0 ? counts[v].first : counts[v].second)++;
    Var x;
    long best = -1;
    for (const auto &[v, lu] : counts) {
      long score = lu.first * lu.second;
      if (best < 0 || score < best) {
        best = score;
        x = v;
      }
    }

    std::vector<Term> rest, bounds;
    std::vector<std::pair<Int, Term>> lowers, uppers;  // a*x + b >= 0 split
    for (const auto &t : ineqs) {
      Int a = t.coeff(x);
      if (a == 0) {
        rest.push_back(t);
        continue;
      }
      bounds.push_back(t);
      Term b = t - Term::var(x, a);
      if (a > 0)
        lowers.emplace_back(a, b);
      else
        uppers.emplace_back(-a, b);
    }

    push_pick(x, bounds);
    bool exact = true;
    std::vector<Term> dark = rest, real = rest;
    for (const auto &[a, b] : lowers) {
      for (const auto &[al, d] : uppers) {
        // from a*x >= -b and al*x <= d: real shadow a*d + al*b >= 0
        Term shadow = d * a + b * al;
        real.push_back(shadow);
        Term tight = shadow - Term((a - 1) * (al - 1));
        if (a > 1 && al > 1) exact = false;
        dark.push_back(std::move(tight));
      }
    }
    if (solve_rec({}, dark)) return true;
    stack_.pop_back();
    if (exact) return false;
    // feasibility probe only: discard the probe's resolution steps
    std::size_t mark = stack_.size();
    bool real_sat = solve_rec({}, std::move(real));
    stack_.resize(mark);
    if (!real_sat) return false;

    // dark shadow failed but real succeeded: check the splinters where some
    // lower bound is almost tight
    Int amax = 0;
    for (const auto &[al, d] : uppers) amax = std::max(amax, al);
    for (const auto &[a, b] : lowers) {
      Int top = floor_div(a * amax - a - amax, amax);
      for (Int i = 0; i <= top; ++i) {
        // a*x = -b + i
        Term eq = Term::var(x, a) + b - Term(i);
        std::vector<Term> eqs{std::move(eq)};
        if (solve_rec(std::move(eqs), ineqs)) return true;
      }
    }
    return false;
  }

  static void apply_subst(std::vector<Term> &ts, const Var &x, const Term &def) {
    for (auto &t : ts) t = t.subst_var(x, def);
  }

  void push_subst(const Var &x, const Term &def) {
    Step s;
    s.is_subst = true;
    s.subst = {x, def};
    stack_.push_back(std::move(s));
  }

  void push_pick(const Var &x, std::vector<Term> bounds) {
    Step s;
    s.is_subst = false;
    s.pick = {x, std::move(bounds)};
    stack_.push_back(std::move(s));
  }

  static Int pick_value(const PickStep &p, const Valuation &m) {
    bool have_lo = false, have_hi = false;
    Int lo = 0, hi = 0;
    for (const auto &t : p.bounds) {
      Int a = t.coeff(p.v);
      Int b = eval_or_zero(t - Term::var(p.v, a), m);
      if (a > 0) {
        Int cand = ceil_div(-b, a);
        if (!have_lo || cand > lo) lo = cand;
        have_lo = true;
      } else {
        Int cand = floor_div(b, -a);
        if (!have_hi || cand < hi) hi = cand;
        have_hi = true;
      }
    }
    if (have_lo && have_hi && lo > hi)
      throw LogicError("omega: empty interval during model reconstruction");
    if (have_lo) return lo;
    if (have_hi) return hi;
    return 0;
  }

  std::vector<Step> stack_;
  long budget_;
};

}  // namespace detail

inline std::optional<Valuation> omega_solve(std::vector<Term> eqs,
                                            std::vector<Term> ineqs,
                                            long budget = 200000) {
  detail::OmegaSolver s(budget);
  return s.solve(std::move(eqs), std::move(ineqs));
}

}  // namespace trl
