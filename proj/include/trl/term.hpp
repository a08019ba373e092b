#pragma once

#include <map>
#include <set>
#include <string>

#include "basics.hpp"
#include "valuation.hpp"

namespace trl {

// Linear combination of variables plus a constant offset. Zero coefficients
// are never stored.
class Term {
 public:
  Term() = default;
  Term(Int constant) : k_(std::move(constant)) {}  // NOLINT: implicit by design
  Term(long constant) : k_(constant) {}            // NOLINT
  Term(int constant) : k_(constant) {}             // NOLINT

  static Term var(const Var &v, Int coeff = 1) {
    Term t;
    if (coeff != 0) t.c_[v] = std::move(coeff);
    return t;
  }

  const std::map<Var, Int> &coeffs() const { return c_; }
  const Int &constant() const { return k_; }

  bool is_constant() const { return c_.empty(); }

  Int coeff(const Var &v) const {
    auto it = c_.find(v);
    return it == c_.end() ? Int(0) : it->second;
  }

  Term &operator+=(const Term &o) {
    for (const auto &[v, cv] : o.c_) add(v, cv);
    k_ += o.k_;
    return *this;
  }

  Term &operator-=(const Term &o) {
    for (const auto &[v, cv] : o.c_) add(v, -cv);
    k_ -= o.k_;
    return *this;
  }

  Term &operator*=(const Int &s) {
    if (s == 0) {
      c_.clear();
      k_ = 0;
      return *this;
    }
    for (auto &[v, cv] : c_) cv *= s;
    k_ *= s;
    return *this;
  }

  friend Term operator+(Term a, const Term &b) { return a += b; }
  friend Term operator-(Term a, const Term &b) { return a -= b; }
  friend Term operator*(Term a, const Int &s) { return a *= s; }
  friend Term operator*(const Int &s, Term a) { return a *= s; }
  friend Term operator-(Term a) { return a *= Int(-1); }

  bool operator==(const Term &o) const { return c_ == o.c_ && k_ == o.k_; }
  bool operator!=(const Term &o) const { return !(*this == o); }
  bool operator<(const Term &o) const {
    if (c_ != o.c_) return c_ < o.c_;
    return k_ < o.k_;
  }

  Int eval(const Valuation &sigma) const {
    Int r = k_;
    for (const auto &[v, cv] : c_) r += cv * sigma.get(v);
    return r;
  }

  void collect_vars(std::set<Var> &out) const {
    for (const auto &[v, cv] : c_) out.insert(v);
  }

  std::set<Var> variables() const {
    std::set<Var> s;
    collect_vars(s);
    return s;
  }

  template <class F>  // F: Var -> Var
  Term rename(F &&f) const {
    Term r(k_);
    for (const auto &[v, cv] : c_) r.add(f(v), cv);
    return r;
  }

  template <class F>  // F: Var -> Term
  Term subst(F &&f) const {
    Term r(k_);
    for (const auto &[v, cv] : c_) r += f(v) * cv;
    return r;
  }

  // Replace one variable by a term, leaving the rest.
  Term subst_var(const Var &v, const Term &t) const {
    return subst([&](const Var &w) { return w == v ? t : Term::var(w); });
  }

  // gcd of all coefficients (not the constant); 0 for constant terms
  Int coeff_gcd() const {
    Int g = 0;
    for (const auto &[v, cv] : c_) g = trl::gcd(g, cv);
    return g;
  }

  std::string to_string() const {
    if (c_.empty()) return k_.get_str();
    std::string s;
    for (const auto &[v, cv] : c_) {
      if (cv > 0 && !s.empty()) s += "+";
      if (cv == -1)
        s += "-";
      else if (cv != 1)
        s += cv.get_str() + "*";
      s += v;
    }
    if (k_ > 0) s += "+" + k_.get_str();
    if (k_ < 0) s += k_.get_str();
    return s;
  }

 private:
  void add(const Var &v, const Int &cv) {
    auto it = c_.find(v);
    if (it == c_.end()) {
      if (cv != 0) c_[v] = cv;
    } else {
      it->second += cv;
      if (it->second == 0) c_.erase(it);
    }
  }

  std::map<Var, Int> c_;
  Int k_{0};
};

}  // namespace trl
