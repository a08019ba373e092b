#pragma once

#include "projection.hpp"

namespace trl {

// Recurrence analysis (transitive projection): generalize a transition to a
// transitive relation guided by a model.

// Disequality preprocessing plus one cvp pass: turns an arbitrary relational
// formula satisfied by sigma into a transition over pre/post variables
// (extras eliminated, s != t split into the sigma-chosen strict side).
inline Transition prepare_for_tp(const Formula &phi, const Valuation &sigma,
                                 const std::vector<Var> &vars) {
  Formula split = phi.transform([](const Literal &l) {
    if (l.kind() == Literal::Kind::Cmp && l.rel() == Rel::Ne) {
      const Term &t = l.term();
      return Formula::lit(Literal::cmp(t - Term(1), Rel::Ge)) ||
             Formula::lit(Literal::cmp(t + Term(1), Rel::Le));
    }
    return Formula::lit(l);
  });
  return cvp(split, sigma, vars);
}

// tau_rec: literals of shape sum c_x*(x'-x) + c  rel  0 (or e | ...) that
// sigma-provably recur, found by projecting tau onto difference variables.
inline Transition recurrent_literals(const Transition &tau,
                                     const Valuation &sigma,
                                     const std::vector<Var> &vars) {
  std::vector<Formula> kids{tau.to_formula()};
  Valuation sigma_d = sigma;
  std::set<Var> deltas;
  std::vector<std::pair<Var, Var>> delta_of;  // state var -> delta var
  for (const auto &x : vars) {
    Var dx = fresh_extra(x + ".d");
    deltas.insert(dx);
    delta_of.emplace_back(x, dx);
    kids.push_back(Formula::lit(
        Literal::eq(Term::var(dx), Term::var(post_of(x)) - Term::var(x))));
    sigma_d.set(dx, sigma.get(post_of(x)) - sigma.get(x));
  }
  Transition tau_delta = cvp(Formula::conj(std::move(kids)), sigma_d, deltas);

  // substitute x_delta back to x' - x; disequalities and indivisibilities do
  // not accumulate over iterations, so they are not recurrent and are dropped
  std::vector<Literal> rec;
  for (const auto &l : tau_delta.literals()) {
    if (l.kind() == Literal::Kind::NotDiv) continue;
    if (l.kind() == Literal::Kind::Cmp && l.rel() == Rel::Ne) continue;
    Literal r = l.subst([&](const Var &v) -> Term {
      for (const auto &[x, dx] : delta_of)
        if (v == dx) return Term::var(post_of(x)) - Term::var(x);
      return Term::var(v);
    });
    if (!r.is_tt()) rec.push_back(std::move(r));
  }
  return Transition(std::move(rec));
}

// Propagate a defining equality of the loop counter (n = t with unit
// coefficient) and drop the counter; no-op when none exists.
inline Formula simplify_counter(const Formula &phi, const Var &n) {
  std::vector<Literal> lits = phi.conjuncts();
  for (std::size_t i = 0; i < lits.size(); ++i) {
    const Literal &l = lits[i];
    if (l.kind() != Literal::Kind::Cmp || l.rel() != Rel::Eq) continue;
    Int c = l.term().coeff(n);
    if (c != 1 && c != -1) continue;
    Term def = (l.term() - Term::var(n, c)) * (-c);  // n = def
    std::vector<Formula> out;
    for (std::size_t j = 0; j < lits.size(); ++j) {
      if (j == i) continue;
      Literal s = lits[j].subst_var(n, def);
      if (!s.is_tt()) out.push_back(Formula::lit(s));
    }
    return Formula::conj(std::move(out));
  }
  return phi;
}

// Locate the counter: the unique generated extra of the relation.
inline Formula simplify_counter(const Formula &phi) {
  std::optional<Var> n;
  for (const auto &v : phi.variables()) {
    if (extra_ordinal(v) >= 0) {
      if (n) return phi;  // ambiguous, leave untouched
      n = v;
    }
  }
  return n ? simplify_counter(phi, *n) : phi;
}

// The transitive projection itself: n > 0, each recurrent literal with its
// constant scaled by n, and the cvp images of tau on pre and on post
// variables.
inline Formula tp(const Transition &tau, const Valuation &sigma,
                  const std::vector<Var> &vars) {
  Transition rec = recurrent_literals(tau, sigma, vars);
  Var n = fresh_extra("n");

  std::vector<Formula> kids;
  kids.push_back(Formula::lit(Literal::gt(Term::var(n), Term(0))));
  for (const auto &l : rec.literals()) {
    // sum c_x*(x'-x) + c  becomes  sum c_x*(x'-x) + n*c
    const Int &c = l.term().constant();
    Term t = l.term() - Term(c) + Term::var(n, c);
    if (l.kind() == Literal::Kind::Cmp)
      kids.push_back(Formula::lit(Literal::cmp(std::move(t), l.rel())));
    else
      kids.push_back(Formula::lit(Literal::divi(
          l.modulus(), std::move(t), l.kind() == Literal::Kind::Div)));
  }

  std::set<Var> pre, post;
  for (const auto &x : vars) {
    pre.insert(x);
    post.insert(post_of(x));
  }
  Transition pre_img = cvp(tau.to_formula(), sigma, pre);
  Transition post_img = cvp(tau.to_formula(), sigma, post);
  for (const auto &l : pre_img.literals()) kids.push_back(Formula::lit(l));
  for (const auto &l : post_img.literals()) kids.push_back(Formula::lit(l));

  // callers propagate the counter away via simplify_counter when desired
  return Formula::conj(std::move(kids));
}

}  // namespace trl
