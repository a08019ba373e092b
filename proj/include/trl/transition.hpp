#pragma once

#include <algorithm>
#include <vector>

#include "formula.hpp"

namespace trl {

// Conjunctive relational formula over pre/post variables (no extras).
class Transition {
 public:
  Transition() = default;
  explicit Transition(std::vector<Literal> lits) : lits_(std::move(lits)) {}

  static Transition of(const Formula &conjunctive) {
    return Transition(conjunctive.conjuncts());
  }

  const std::vector<Literal> &literals() const { return lits_; }
  bool empty() const { return lits_.empty(); }

  Formula to_formula() const {
    std::vector<Formula> kids;
    kids.reserve(lits_.size());
    for (const auto &l : lits_) kids.push_back(Formula::lit(l));
    return Formula::conj(std::move(kids));
  }

  bool eval(const Valuation &sigma) const {
    for (const auto &l : lits_)
      if (!l.eval(sigma)) return false;
    return true;
  }

  std::set<Var> variables() const { return to_formula().variables(); }

  // Identity for dependency-graph nodes: sorted, deduplicated multiset of
  // normalized literal renderings. Trivially true literals are dropped; any
  // false literal collapses the key.
  std::string canonical_key() const {
    std::vector<std::string> keys;
    for (const auto &l : lits_) {
      if (l.is_tt()) continue;
      if (l.is_ff()) return "false";
      keys.push_back(l.canonical_string());
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::string s;
    for (const auto &k : keys) s += k + ";";
    return s;
  }

  std::string to_string() const { return to_formula().to_string(); }

 private:
  std::vector<Literal> lits_;
};

}  // namespace trl
