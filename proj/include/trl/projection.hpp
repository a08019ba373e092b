#pragma once

#include <algorithm>
#include <optional>

#include "rename.hpp"
#include "transition.hpp"

namespace trl {

// Syntactic implicant projection: the conjunction of literals along one
// sigma-satisfied NNF branch (leftmost satisfied Or child).
inline void sip_collect(const Formula &phi, const Valuation &sigma,
                        std::vector<Literal> &out) {
  switch (phi.kind()) {
    case Formula::Kind::Lit:
      if (!phi.literal().eval(sigma))
        throw LogicError("sip: model does not satisfy the formula");
      out.push_back(phi.literal());
      return;
    case Formula::Kind::And:
      for (const auto &k : phi.children()) sip_collect(k, sigma, out);
      return;
    case Formula::Kind::Or:
      for (const auto &k : phi.children()) {
        if (k.eval(sigma)) {
          sip_collect(k, sigma, out);
          return;
        }
      }
      throw LogicError("sip: model does not satisfy the formula");
  }
  throw LogicError("unreachable");
}

inline Transition sip(const Formula &phi, const Valuation &sigma) {
  std::vector<Literal> lits;
  sip_collect(phi, sigma, lits);
  // tidy: drop trivial literals, deduplicate
  std::vector<Literal> out;
  for (const auto &l : lits) {
    if (l.is_tt()) continue;
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  return Transition(std::move(out));
}

namespace detail {

// One model-guided Cooper elimination step for variable z. Works by
// substituting a virtual term for the scaled variable z~ = L*z, which keeps
// the result a substitution instance (so it entails the existential) while
// the choice of term preserves satisfaction under sigma.
class CooperStep {
 public:
  CooperStep(const Var &z, const Valuation &sigma) : z_(z), sigma_(sigma) {}

  Formula eliminate(const Formula &phi0) {
    // disequalities over z are split into the sigma-chosen strict side
    Formula phi = phi0.transform([&](const Literal &l) {
      if (l.kind() == Literal::Kind::Cmp && l.rel() == Rel::Ne &&
          l.term().coeff(z_) != 0) {
        const Term &t = l.term();
        if (t.eval(sigma_) >= 0) return Formula::lit(Literal::cmp(t - Term(1), Rel::Ge));
        return Formula::lit(Literal::cmp(t + Term(1), Rel::Le));
      }
      return Formula::lit(l);
    });

    scan(phi);
    if (big_l_ == 0) return phi;  // z does not occur

    Term t = pick_term(phi);
    Formula out = substitute(phi, t);
    if (big_l_ > 1)
      out = out && Formula::lit(Literal::divi(big_l_, t));
    return out;
  }

 private:
  void scan(const Formula &phi) {
    big_l_ = 0;
    big_m_ = 1;
    std::vector<std::pair<Int, Int>> divs;  // |coeff|, modulus
    phi.transform([&](const Literal &l) {
      Int c = l.term().coeff(z_);
      if (c != 0) {
        Int a = abs(c);
        big_l_ = big_l_ == 0 ? a : lcm(big_l_, a);
        if (l.kind() != Literal::Kind::Cmp) divs.emplace_back(a, l.modulus());
      }
      return Formula::lit(l);
    });
    if (big_l_ == 0) return;
    big_m_ = big_l_;
    // after scaling to z~ = L*z a divisibility literal has modulus (L/|c|)*e
    for (const auto &[a, e] : divs) big_m_ = lcm(big_m_, (big_l_ / a) * e);
  }

  // candidate virtual term for z~ = L*z
  Term pick_term(const Formula &phi) {
    // preferred: a sigma-satisfied defining equality; otherwise the
    // sigma-maximal satisfied lower bound plus the model residue; dually the
    // sigma-minimal upper bound; as a last resort the residue alone
    std::optional<std::pair<Int, Term>> eq;      // |coeff|, z~ = term
    std::optional<std::pair<Int, Term>> lo, hi;  // sigma-value, bound term
    walk_literals(phi, [&](const Literal &l) {
      Int c = l.term().coeff(z_);
      if (c == 0 || l.kind() != Literal::Kind::Cmp) return;
      if (!l.eval(sigma_)) return;
      Int m = big_l_ / abs(c);
      Int sign = c > 0 ? 1 : -1;
      Term s = (l.term() - Term::var(z_, c)) * m;  // z~*sign + s  rel  0
      switch (l.rel()) {
        case Rel::Eq:
          // z~ = -sign*s
          if (!eq || abs(c) < eq->first) eq = {abs(c), s * (-sign)};
          break;
        case Rel::Ge:
          // sign*z~ >= -s
          if (sign > 0) add_lower(lo, -s);
          else add_upper(hi, s);
          break;
        case Rel::Le:
          if (sign > 0) add_upper(hi, -s);
          else add_lower(lo, s);
          break;
        case Rel::Ne:
          throw LogicError("disequality not rewritten");
      }
    });
    Int zt = sigma_.get(z_) * big_l_;  // sigma(z~)
    if (eq) return eq->second;
    if (lo) {
      Int j = pos_mod(zt - lo->first, big_m_);
      return lo->second + Term(j);
    }
    if (hi) {
      Int j = pos_mod(hi->first - zt, big_m_);
      return hi->second - Term(j);
    }
    return Term(pos_mod(zt, big_m_));
  }

  void add_lower(std::optional<std::pair<Int, Term>> &lo, Term b) {
    Int v = b.eval(sigma_);
    if (!lo || v > lo->first) lo = {v, std::move(b)};
  }

  void add_upper(std::optional<std::pair<Int, Term>> &hi, Term b) {
    Int v = b.eval(sigma_);
    if (!hi || v < hi->first) hi = {v, std::move(b)};
  }

  Formula substitute(const Formula &phi, const Term &t) {
    return phi.transform([&](const Literal &l) {
      Int c = l.term().coeff(z_);
      if (c == 0) return Formula::lit(l);
      Int m = big_l_ / abs(c);
      Int sign = c > 0 ? 1 : -1;
      Term u = (l.term() - Term::var(z_, c)) * m + t * sign;
      if (l.kind() == Literal::Kind::Cmp)
        return Formula::lit(Literal::cmp(std::move(u), l.rel()));
      return Formula::lit(Literal::divi(l.modulus() * m, std::move(u),
                                        l.kind() == Literal::Kind::Div));
    });
  }

  template <class F>
  static void walk_literals(const Formula &phi, F &&f) {
    if (phi.kind() == Formula::Kind::Lit) {
      f(phi.literal());
    } else {
      for (const auto &k : phi.children()) walk_literals(k, f);
    }
  }

  Var z_;
  const Valuation &sigma_;
  Int big_l_{0};  // lcm of |coefficients| of z
  Int big_m_{1};  // lcm of L and the divisibility moduli mentioning z
};

}  // namespace detail

// Elimination order: generated extras youngest-first, then the rest in
// reverse lexicographic order.
inline std::vector<Var> elimination_order(const Formula &phi,
                                          const std::set<Var> &keep) {
  std::vector<Var> vs;
  for (const auto &v : phi.variables())
    if (!keep.count(v)) vs.push_back(v);
  std::sort(vs.begin(), vs.end(), [](const Var &a, const Var &b) {
    long oa = extra_ordinal(a), ob = extra_ordinal(b);
    if (oa != ob) return oa > ob;
    return a > b;
  });
  return vs;
}

// Model-based projection: Cooper elimination of all variables outside keep,
// with the disjunct selected by sigma.
inline Formula mbp(const Formula &phi, const Valuation &sigma,
                   const std::set<Var> &keep) {
  if (!phi.eval(sigma)) throw LogicError("mbp: model does not satisfy the formula");
  Formula cur = phi;
  for (const auto &z : elimination_order(phi, keep))
    cur = detail::CooperStep(z, sigma).eliminate(cur);
  return cur;
}

// Conjunctive variable projection: cvp = sip o mbp.
inline Transition cvp(const Formula &phi, const Valuation &sigma,
                      const std::set<Var> &keep) {
  return sip(mbp(phi, sigma, keep), sigma);
}

// keep defaults to pre and post variables
inline Transition cvp(const Formula &phi, const Valuation &sigma,
                      const std::vector<Var> &vars) {
  std::set<Var> keep;
  for (const auto &x : vars) {
    keep.insert(x);
    keep.insert(post_of(x));
  }
  return cvp(phi, sigma, keep);
}

}  // namespace trl
