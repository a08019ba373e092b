#pragma once

#include <vector>

#include "formula.hpp"

namespace trl {

// Safety problem (init, rel, err) over a fixed pre-variable vector; post
// variables are the primed copies, anything else in rel is an extra.
struct SafetyProblem {
  std::vector<Var> vars;
  Formula init;
  Formula rel;
  Formula err;

  std::size_t dim() const { return vars.size(); }

  bool is_state_var(const Var &v) const {
    for (const auto &x : vars)
      if (x == v) return true;
    return false;
  }

  std::vector<Var> post_vars() const {
    std::vector<Var> r;
    r.reserve(vars.size());
    for (const auto &x : vars) r.push_back(post_of(x));
    return r;
  }

  // Extra variables occurring in rel.
  std::set<Var> extras() const {
    std::set<Var> r;
    for (const auto &v : rel.variables()) {
      if (is_state_var(v)) continue;
      if (is_post(v) && is_state_var(pre_of(v))) continue;
      r.insert(v);
    }
    return r;
  }

  void validate() const {
    for (const auto &x : vars)
      if (is_generated(x) || is_post(x))
        throw LogicError("illegal state variable name: " + x);
    for (const auto &v : init.variables())
      if (!is_state_var(v))
        throw LogicError("init must range over pre-variables, got: " + v);
    for (const auto &v : err.variables())
      if (!is_state_var(v))
        throw LogicError("err must range over pre-variables, got: " + v);
    for (const auto &v : rel.variables())
      if (is_generated(v))
        throw LogicError("rel must not contain generated variables: " + v);
  }
};

}  // namespace trl
