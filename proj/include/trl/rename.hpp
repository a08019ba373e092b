#pragma once

#include <vector>

#include "formula.hpp"

namespace trl {

// Indexed renamings mu_{i,j}: pre x -> x@i, post x' -> x@(i+j), extras
// renamed apart per unrolling (v -> v@e<i>, deterministic so the composed
// model sigma(mu_i(.)) can be reconstructed later).

inline Var mid_extra(const Var &base, long off) {
  return base + "@m" + std::to_string(off);
}

template <class Vars>
inline bool contains_var(const Vars &vars, const Var &v) {
  for (const auto &x : vars)
    if (x == v) return true;
  return false;
}

inline Formula rename_indexed(const Formula &phi, const std::vector<Var> &vars,
                              long i, long j = 1) {
  if (i < 1 || j < 1) throw LogicError("mu_{i,j} needs i,j >= 1");
  for (const auto &v : phi.variables())
    if (v.find('@') != Var::npos || (!v.empty() && v.front() == '!'))
      throw LogicError("formula already contains indexed variables: " + v);
  return phi.rename([&](const Var &v) -> Var {
    if (contains_var(vars, v)) return indexed(v, i);
    if (is_post(v) && contains_var(vars, pre_of(v)))
      return indexed(pre_of(v), i + j);
    return step_extra(v, i);
  });
}

// Inverse of mu_{i,j} on its image. Indexed variables strictly between the
// endpoints (j > 1 only) become deterministic extra variables x@m<offset>.
inline Formula unrename_indexed(const Formula &phi, const std::vector<Var> &vars,
                                long i, long j = 1) {
  return phi.rename([&](const Var &v) -> Var {
    if (is_indexed(v)) {
      auto [base, k] = split_indexed(v);
      if (!contains_var(vars, base) || k < i || k > i + j)
        throw LogicError("variable outside the image of mu: " + v);
      if (k == i) return base;
      if (k == i + j) return post_of(base);
      return mid_extra(base, k - i);
    }
    auto suffix = "@e" + std::to_string(i);
    if (v.size() > suffix.size() &&
        v.compare(v.size() - suffix.size(), suffix.size(), suffix) == 0)
      return v.substr(0, v.size() - suffix.size());
    throw LogicError("variable outside the image of mu: " + v);
  });
}

// sigma o mu_{i,j}: valuation nu with nu(v) = sigma(mu_{i,j}(v)) on pre/post
// variables, the mid extras of unrename_indexed, and the given extras.
inline Valuation compose_model(const Valuation &sigma,
                               const std::vector<Var> &vars, long i, long j = 1,
                               const std::set<Var> &extras = {}) {
  Valuation nu;
  for (const auto &x : vars) {
    nu.set(x, sigma.get(indexed(x, i)));
    nu.set(post_of(x), sigma.get(indexed(x, i + j)));
    for (long k = i + 1; k < i + j; ++k)
      nu.set(mid_extra(x, k - i), sigma.get(indexed(x, k)));
  }
  for (const auto &v : extras) nu.set(v, sigma.get(step_extra(v, i)));
  return nu;
}

}  // namespace trl
