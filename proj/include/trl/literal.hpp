#pragma once

#include <string>

#include "term.hpp"

namespace trl {

enum class Rel { Le, Ge, Eq, Ne };  // t <= 0, t >= 0, t = 0, t != 0

// Atomic constraint: either a comparison "t rel 0" or (in)divisibility
// "e | t" / "e !| t" with e >= 2. Strict comparisons are normalized away at
// construction (t > 0 becomes t-1 >= 0 over the integers) and inequality
// coefficients are gcd-tightened, so equal constraints share one shape.
class Literal {
 public:
  enum class Kind { Cmp, Div, NotDiv };

  static Literal cmp(Term t, Rel r) { return normalize_cmp(std::move(t), r); }

  static Literal eq(Term a, Term b) { return cmp(a - b, Rel::Eq); }
  static Literal ne(Term a, Term b) { return cmp(a - b, Rel::Ne); }
  static Literal le(Term a, Term b) { return cmp(a - b, Rel::Le); }
  static Literal ge(Term a, Term b) { return cmp(a - b, Rel::Ge); }
  static Literal lt(Term a, Term b) { return cmp(a - b + Term(1), Rel::Le); }
  static Literal gt(Term a, Term b) { return cmp(a - b - Term(1), Rel::Ge); }

  static Literal divi(Int e, Term t, bool positive = true) {
    if (e < 1) throw LogicError("modulus must be positive");
    if (e == 1) return positive ? tt() : ff();
    if (t.is_constant())
      return divides(e, t.constant()) == positive ? tt() : ff();
    Literal l;
    l.kind_ = positive ? Kind::Div : Kind::NotDiv;
    l.t_ = std::move(t);
    l.e_ = std::move(e);
    return l;
  }

  static Literal tt() { return cmp(Term(0), Rel::Eq); }
  static Literal ff() { return cmp(Term(1), Rel::Eq); }

  Kind kind() const { return kind_; }
  Rel rel() const { return rel_; }
  const Term &term() const { return t_; }
  const Int &modulus() const { return e_; }

  bool is_cmp() const { return kind_ == Kind::Cmp; }
  bool is_tt() const { return is_cmp() && t_.is_constant() && holds(t_.constant(), rel_); }
  bool is_ff() const { return is_cmp() && t_.is_constant() && !holds(t_.constant(), rel_); }

  Literal complement() const {
    Literal l = *this;
    switch (kind_) {
      case Kind::Div:
        l.kind_ = Kind::NotDiv;
        return l;
      case Kind::NotDiv:
        l.kind_ = Kind::Div;
        return l;
      case Kind::Cmp:
        switch (rel_) {
          case Rel::Eq: return cmp(t_, Rel::Ne);
          case Rel::Ne: return cmp(t_, Rel::Eq);
          case Rel::Le: return cmp(t_ - Term(1), Rel::Ge);  // !(t<=0) iff t-1>=0
          case Rel::Ge: return cmp(t_ + Term(1), Rel::Le);  // !(t>=0) iff t+1<=0
        }
    }
    throw LogicError("unreachable");
  }

  bool eval(const Valuation &sigma) const {
    Int v = t_.eval(sigma);
    switch (kind_) {
      case Kind::Cmp: return holds(v, rel_);
      case Kind::Div: return divides(e_, v);
      case Kind::NotDiv: return !divides(e_, v);
    }
    throw LogicError("unreachable");
  }

  void collect_vars(std::set<Var> &out) const { t_.collect_vars(out); }

  template <class F>  // F: Var -> Var
  Literal rename(F &&f) const {
    Literal l = *this;
    l.t_ = t_.rename(f);
    return relabel(std::move(l));
  }

  Literal subst_var(const Var &v, const Term &t) const {
    return subst([&](const Var &w) { return w == v ? t : Term::var(w); });
  }

  template <class F>  // F: Var -> Term
  Literal subst(F &&f) const {
    Term t = t_.subst(f);
    if (kind_ == Kind::Cmp) return cmp(std::move(t), rel_);
    return divi(e_, std::move(t), kind_ == Kind::Div);
  }

  bool operator==(const Literal &o) const {
    return kind_ == o.kind_ && rel_ == o.rel_ && e_ == o.e_ && t_ == o.t_;
  }
  bool operator<(const Literal &o) const {
    if (kind_ != o.kind_) return kind_ < o.kind_;
    if (rel_ != o.rel_) return rel_ < o.rel_;
    if (e_ != o.e_) return e_ < o.e_;
    return t_ < o.t_;
  }

  // Sign- and modulus-normalized rendering, identical for semantically equal
  // normalized literals (<= mirrored onto >=, =/!=/| given a positive leading
  // coefficient, divisibility arguments reduced mod e).
  std::string canonical_string() const {
    Term t = t_;
    const char *op = nullptr;
    switch (kind_) {
      case Kind::Cmp:
        switch (rel_) {
          case Rel::Le: t = -t; op = ">="; break;
          case Rel::Ge: op = ">="; break;
          case Rel::Eq: op = "="; break;
          case Rel::Ne: op = "!="; break;
        }
        if ((rel_ == Rel::Eq || rel_ == Rel::Ne) && !t.coeffs().empty() &&
            t.coeffs().begin()->second < 0)
          t = -t;
        return t.to_string() + op + "0";
      case Kind::Div:
      case Kind::NotDiv: {
        Term u;
        for (const auto &[v, cv] : t.coeffs()) u += Term::var(v, pos_mod(cv, e_));
        u += Term(pos_mod(t.constant(), e_));
        return e_.get_str() + (kind_ == Kind::Div ? "|" : "!|") + u.to_string();
      }
    }
    throw LogicError("unreachable");
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::Cmp: {
        const char *op = rel_ == Rel::Le   ? "<="
                         : rel_ == Rel::Ge ? ">="
                         : rel_ == Rel::Eq ? "="
                                           : "!=";
        return t_.to_string() + op + "0";
      }
      case Kind::Div: return e_.get_str() + "|" + t_.to_string();
      case Kind::NotDiv: return e_.get_str() + "!|" + t_.to_string();
    }
    throw LogicError("unreachable");
  }

 private:
  Literal() = default;

  static bool holds(const Int &v, Rel r) {
    switch (r) {
      case Rel::Le: return v <= 0;
      case Rel::Ge: return v >= 0;
      case Rel::Eq: return v == 0;
      case Rel::Ne: return v != 0;
    }
    throw LogicError("unreachable");
  }

  static Literal normalize_cmp(Term t, Rel r) {
    Int g = t.coeff_gcd();
    if (g > 1) {
      const Int &c = t.constant();
      Term u;
      for (const auto &[v, cv] : t.coeffs()) u += Term::var(v, cv / g);
      switch (r) {
        // sum c_x x <= -c  iff  sum (c_x/g) x <= floor(-c/g)
        case Rel::Le: u += Term(ceil_div(c, g)); break;
        case Rel::Ge: u += Term(floor_div(c, g)); break;
        case Rel::Eq:
        case Rel::Ne:
          if (!divides(g, c)) {
            // no integer solutions make the sum hit -c
            Literal l;
            l.kind_ = Kind::Cmp;
            l.rel_ = r;
            l.t_ = Term(1);  // 1=0 is false, 1!=0 is true
            return l;
          }
          u += Term(c / g);
          break;
      }
      t = std::move(u);
    }
    Literal l;
    l.kind_ = Kind::Cmp;
    l.rel_ = r;
    l.t_ = std::move(t);
    return l;
  }

  // Re-run construction-time normalization after a term rewrite.
  static Literal relabel(Literal l) {
    if (l.kind_ == Kind::Cmp) return normalize_cmp(std::move(l.t_), l.rel_);
    return divi(l.e_, std::move(l.t_), l.kind_ == Kind::Div);
  }

  Kind kind_{Kind::Cmp};
  Rel rel_{Rel::Eq};
  Term t_;
  Int e_{0};  // modulus, Div/NotDiv only
};

}  // namespace trl
