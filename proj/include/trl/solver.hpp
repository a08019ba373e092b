#pragma once

#include <memory>
#include <optional>

#include "formula.hpp"
#include "omega.hpp"

namespace trl {

enum class SatResult { Sat, Unsat };

// Incremental satisfiability session: push/pop frames, assert, check, model.
// Models are completed over all declared variables (unassigned -> 0).
class SolverSession {
 public:
  virtual ~SolverSession() = default;
  virtual void declare(const Var &v) = 0;
  virtual void assert_formula(const Formula &phi) = 0;
  virtual void push() = 0;
  virtual void pop() = 0;
  virtual SatResult check_sat() = 0;
  virtual Valuation get_model() = 0;
};

namespace detail {

// Branch-and-solve search: walk the And/Or structure collecting literal
// constraints, branch on Or nodes (leftmost first) and on disequalities,
// decide leaves with the omega test. Infeasible prefixes are pruned at every
// branch point, which keeps the search shallow on unsat encodings.
class SatSearch {
 public:
  explicit SatSearch(long budget) : budget_(budget) {}

  std::optional<Valuation> run(const std::vector<Formula> &formulas) {
    std::vector<Formula> pending(formulas.rbegin(), formulas.rend());
    std::vector<Term> eqs, ineqs;
    return walk(pending, eqs, ineqs);
  }

 private:
  std::optional<Valuation> walk(std::vector<Formula> &pending,
                                std::vector<Term> &eqs,
                                std::vector<Term> &ineqs) {
    while (!pending.empty()) {
      Formula f = pending.back();
      pending.pop_back();
      switch (f.kind()) {
        case Formula::Kind::And: {
          const auto &kids = f.children();
          for (auto it = kids.rbegin(); it != kids.rend(); ++it)
            pending.push_back(*it);
          break;
        }
        case Formula::Kind::Or: {
          if (!omega_solve(eqs, ineqs, budget_)) return std::nullopt;
          for (const auto &kid : f.children()) {
            auto saved_p = pending;
            auto saved_e = eqs;
            auto saved_i = ineqs;
            saved_p.push_back(kid);
            if (auto m = walk(saved_p, saved_e, saved_i)) return m;
          }
          return std::nullopt;
        }
        case Formula::Kind::Lit:
          if (!add_literal(f.literal(), pending, eqs, ineqs)) {
            // disequality was branched inside add_literal
            return branch_ne(f.literal(), pending, eqs, ineqs);
          }
          break;
      }
    }
    return omega_solve(eqs, ineqs, budget_);
  }

  // returns false when the literal needs branching (Ne)
  bool add_literal(const Literal &l, std::vector<Formula> &pending,
                   std::vector<Term> &eqs, std::vector<Term> &ineqs) {
    switch (l.kind()) {
      case Literal::Kind::Cmp:
        switch (l.rel()) {
          case Rel::Le: ineqs.push_back(-l.term()); return true;
          case Rel::Ge: ineqs.push_back(l.term()); return true;
          case Rel::Eq: eqs.push_back(l.term()); return true;
          case Rel::Ne: return false;
        }
        break;
      case Literal::Kind::Div: {
        // t = e*q
        Var q = fresh_extra(".q");
        eqs.push_back(l.term() - Term::var(q, l.modulus()));
        return true;
      }
      case Literal::Kind::NotDiv: {
        // t = e*q + r with 1 <= r <= e-1
        Var q = fresh_extra(".q");
        Var r = fresh_extra(".r");
        eqs.push_back(l.term() - Term::var(q, l.modulus()) - Term::var(r));
        ineqs.push_back(Term::var(r) - Term(1));
        ineqs.push_back(Term(l.modulus() - 1) - Term::var(r));
        return true;
      }
    }
    throw LogicError("unreachable");
  }

  std::optional<Valuation> branch_ne(const Literal &l,
                                     std::vector<Formula> &pending,
                                     std::vector<Term> &eqs,
                                     std::vector<Term> &ineqs) {
    // t != 0 iff t >= 1 or t <= -1
    for (int side = 0; side < 2; ++side) {
      auto saved_p = pending;
      auto saved_e = eqs;
      auto saved_i = ineqs;
      saved_i.push_back(side == 0 ? l.term() - Term(1) : -l.term() - Term(1));
      if (auto m = walk(saved_p, saved_e, saved_i)) return m;
    }
    return std::nullopt;
  }

  long budget_;
};

}  // namespace detail

// One-shot satisfiability of a single formula.
inline std::optional<Valuation> solve_formula(const Formula &phi,
                                              long budget = 200000) {
  detail::SatSearch s(budget);
  return s.run({phi});
}

class EmbeddedSession : public SolverSession {
 public:
  explicit EmbeddedSession(long budget = 2000000) : budget_(budget) {
    frames_.emplace_back();
  }

  void declare(const Var &v) override { declared_.insert(v); }

  void assert_formula(const Formula &phi) override {
    for (const auto &v : phi.variables()) declared_.insert(v);
    frames_.back().push_back(phi);
    model_.reset();
  }

  void push() override { frames_.emplace_back(); }

  void pop() override {
    if (frames_.size() <= 1) throw LogicError("pop on empty solver stack");
    frames_.pop_back();
    model_.reset();
  }

  SatResult check_sat() override {
    std::vector<Formula> all;
    for (const auto &fr : frames_)
      for (const auto &f : fr) all.push_back(f);
    detail::SatSearch s(budget_);
    auto m = s.run(all);
    if (!m) {
      model_.reset();
      return SatResult::Unsat;
    }
    Valuation full;
    for (const auto &v : declared_) full.set(v, m->has(v) ? m->get(v) : Int(0));
    model_ = std::move(full);
    return SatResult::Sat;
  }

  Valuation get_model() override {
    if (!model_) throw LogicError("get_model without preceding sat check");
    return *model_;
  }

  // assertion multiset, for stack-discipline audits
  std::vector<Formula> assertions() const {
    std::vector<Formula> all;
    for (const auto &fr : frames_)
      for (const auto &f : fr) all.push_back(f);
    return all;
  }

  std::size_t frame_count() const { return frames_.size(); }

 private:
  std::vector<std::vector<Formula>> frames_;
  std::set<Var> declared_;
  std::optional<Valuation> model_;
  long budget_;
};

}  // namespace trl
