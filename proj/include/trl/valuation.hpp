#pragma once

#include <map>
#include <string>

#include "basics.hpp"

namespace trl {

// Partial map from variables to integers.
class Valuation {
 public:
  Valuation() = default;
  Valuation(std::initializer_list<std::pair<const Var, Int>> init) : m_(init) {}

  bool has(const Var &v) const { return m_.count(v) != 0; }

  const Int &get(const Var &v) const {
    auto it = m_.find(v);
    if (it == m_.end()) throw LogicError("unbound variable: " + v);
    return it->second;
  }

  void set(const Var &v, Int val) { m_[v] = std::move(val); }

  // Right-biased union: bindings of other win on overlap.
  Valuation extend(const Valuation &other) const {
    Valuation r = *this;
    for (const auto &[v, val] : other.m_) r.m_[v] = val;
    return r;
  }

  std::size_t size() const { return m_.size(); }
  bool empty() const { return m_.empty(); }

  auto begin() const { return m_.begin(); }
  auto end() const { return m_.end(); }

  bool operator==(const Valuation &other) const { return m_ == other.m_; }

  std::string to_string() const {
    std::string s = "[";
    bool first = true;
    for (const auto &[v, val] : m_) {
      if (!first) s += ", ";
      first = false;
      s += v + "/" + val.get_str();
    }
    return s + "]";
  }

 private:
  std::map<Var, Int> m_;
};

}  // namespace trl
