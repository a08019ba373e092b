#pragma once

#include <memory>
#include <vector>

#include "literal.hpp"

namespace trl {

// Quantifier-free formula tree: And / Or / Literal. Negation exists only via
// literal complementation (negate_nnf). Values are immutable and share
// subtrees freely.
class Formula {
 public:
  enum class Kind { Lit, And, Or };

  Formula() : Formula(tt()) {}

  static Formula lit(Literal l) {
    Formula f{Raw{}};
    f.n_ = std::make_shared<Node>(Node{Kind::Lit, std::move(l), {}});
    return f;
  }

  static Formula conj(std::vector<Formula> kids) {
    return flatten(Kind::And, std::move(kids));
  }

  static Formula disj(std::vector<Formula> kids) {
    return flatten(Kind::Or, std::move(kids));
  }

  static Formula tt() {
    static const Formula t = make(Kind::And, {});
    return t;
  }

  static Formula ff() {
    static const Formula f = make(Kind::Or, {});
    return f;
  }

  Kind kind() const { return n_->kind; }
  const Literal &literal() const {
    if (n_->kind != Kind::Lit) throw LogicError("not a literal node");
    return n_->lit;
  }
  const std::vector<Formula> &children() const { return n_->kids; }

  bool is_tt() const {
    return (n_->kind == Kind::And && n_->kids.empty()) ||
           (n_->kind == Kind::Lit && n_->lit.is_tt());
  }
  bool is_ff() const {
    return (n_->kind == Kind::Or && n_->kids.empty()) ||
           (n_->kind == Kind::Lit && n_->lit.is_ff());
  }

  bool eval(const Valuation &sigma) const {
    switch (n_->kind) {
      case Kind::Lit: return n_->lit.eval(sigma);
      case Kind::And:
        for (const auto &k : n_->kids)
          if (!k.eval(sigma)) return false;
        return true;
      case Kind::Or:
        for (const auto &k : n_->kids)
          if (k.eval(sigma)) return true;
        return false;
    }
    throw LogicError("unreachable");
  }

  Formula negate_nnf() const {
    switch (n_->kind) {
      case Kind::Lit: return lit(n_->lit.complement());
      case Kind::And:
      case Kind::Or: {
        std::vector<Formula> kids;
        kids.reserve(n_->kids.size());
        for (const auto &k : n_->kids) kids.push_back(k.negate_nnf());
        return n_->kind == Kind::And ? disj(std::move(kids))
                                     : conj(std::move(kids));
      }
    }
    throw LogicError("unreachable");
  }

  void collect_vars(std::set<Var> &out) const {
    if (n_->kind == Kind::Lit) {
      n_->lit.collect_vars(out);
    } else {
      for (const auto &k : n_->kids) k.collect_vars(out);
    }
  }

  std::set<Var> variables() const {
    std::set<Var> s;
    collect_vars(s);
    return s;
  }

  template <class F>  // F: Literal -> Formula
  Formula transform(F &&f) const {
    switch (n_->kind) {
      case Kind::Lit: return f(n_->lit);
      case Kind::And:
      case Kind::Or: {
        std::vector<Formula> kids;
        kids.reserve(n_->kids.size());
        for (const auto &k : n_->kids) kids.push_back(k.transform(f));
        return n_->kind == Kind::And ? conj(std::move(kids))
                                     : disj(std::move(kids));
      }
    }
    throw LogicError("unreachable");
  }

  template <class F>  // F: Var -> Var
  Formula rename(F &&f) const {
    return transform([&](const Literal &l) { return lit(l.rename(f)); });
  }

  template <class F>  // F: Var -> Term
  Formula subst(F &&f) const {
    return transform([&](const Literal &l) { return lit(l.subst(f)); });
  }

  Formula subst_var(const Var &v, const Term &t) const {
    return subst([&](const Var &w) { return w == v ? t : Term::var(w); });
  }

  // Literals of a purely conjunctive formula.
  std::vector<Literal> conjuncts() const {
    std::vector<Literal> out;
    collect_conjuncts(out);
    return out;
  }

  std::string to_string() const {
    switch (n_->kind) {
      case Kind::Lit: return n_->lit.to_string();
      case Kind::And:
      case Kind::Or: {
        if (n_->kids.empty()) return n_->kind == Kind::And ? "true" : "false";
        std::string sep = n_->kind == Kind::And ? " & " : " | ";
        std::string s = "(";
        for (std::size_t i = 0; i < n_->kids.size(); ++i) {
          if (i) s += sep;
          s += n_->kids[i].to_string();
        }
        return s + ")";
      }
    }
    throw LogicError("unreachable");
  }

 private:
  struct Node {
    Kind kind;
    Literal lit{Literal::tt()};
    std::vector<Formula> kids;
  };

  struct Raw {};
  explicit Formula(Raw) {}

  static Formula make(Kind k, std::vector<Formula> kids) {
    Formula f{Raw{}};
    f.n_ = std::make_shared<Node>(Node{k, Literal::tt(), std::move(kids)});
    return f;
  }

  // Unit collapse and absorption of neutral/absorbing elements; nested nodes
  // of the same kind are spliced in.
  static Formula flatten(Kind k, std::vector<Formula> kids) {
    std::vector<Formula> out;
    for (auto &c : kids) {
      if (k == Kind::And) {
        if (c.is_tt()) continue;
        if (c.is_ff()) return ff();
      } else {
        if (c.is_ff()) continue;
        if (c.is_tt()) return tt();
      }
      if (c.kind() == k) {
        for (const auto &g : c.children()) out.push_back(g);
      } else {
        out.push_back(std::move(c));
      }
    }
    if (out.size() == 1) return out[0];
    return make(k, std::move(out));
  }

  void collect_conjuncts(std::vector<Literal> &out) const {
    switch (n_->kind) {
      case Kind::Lit: out.push_back(n_->lit); return;
      case Kind::And:
        for (const auto &k : n_->kids) k.collect_conjuncts(out);
        return;
      case Kind::Or:
        if (n_->kids.size() == 1) {
          n_->kids[0].collect_conjuncts(out);
          return;
        }
        throw LogicError("formula is not conjunctive");
    }
    throw LogicError("unreachable");
  }

  std::shared_ptr<const Node> n_;
};

inline Formula operator&&(const Formula &a, const Formula &b) {
  return Formula::conj({a, b});
}
inline Formula operator||(const Formula &a, const Formula &b) {
  return Formula::disj({a, b});
}

}  // namespace trl
