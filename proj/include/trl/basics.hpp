#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace trl {

// Arbitrary-precision integers. Learned relations multiply constants by a
// symbolic counter, so fixed-width arithmetic would silently overflow.
using Int = mpz_class;

inline Int gcd(const Int &a, const Int &b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm(const Int &a, const Int &b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int floor_div(const Int &a, const Int &b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int ceil_div(const Int &a, const Int &b) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// a mod b in [0, b), b > 0
inline Int pos_mod(const Int &a, const Int &b) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// Symmetric remainder in (-b/2, b/2], b > 0. Used by the equality
// elimination of the integer feasibility test.
inline Int sym_mod(const Int &a, const Int &b) {
  Int r = pos_mod(a, b);
  if (2 * r > b) r -= b;
  return r;
}

inline bool divides(const Int &e, const Int &a) {
  return mpz_divisible_p(a.get_mpz_t(), e.get_mpz_t()) != 0;
}

inline long to_long(const Int &a) {
  if (!a.fits_slong_p()) throw std::overflow_error("integer too large for long");
  return a.get_si();
}

class LogicError : public std::runtime_error {
 public:
  explicit LogicError(const std::string &msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Variable naming scheme.
//
// Variables are plain strings. User-facing variables contain neither '@' nor
// '%' nor '!'; everything the library generates is recognizable from its
// name alone:
//
//   x        pre-variable (member of the problem's variable vector)
//   x'       post-variable
//   x@3      indexed variable x^(3) of the unrolled encoding
//   x@e3     step-local copy of the extra variable x (third unrolling)
//   !id@3    step-id variable of the third unrolling
//   n%17     generated extra variable (global creation ordinal 17)
// ---------------------------------------------------------------------------

using Var = std::string;

inline std::atomic<std::uint64_t> &fresh_counter() {
  static std::atomic<std::uint64_t> c{0};
  return c;
}

inline Var fresh_extra(const std::string &hint) {
  return hint + "%" + std::to_string(fresh_counter().fetch_add(1) + 1);
}

inline bool is_post(const Var &v) { return !v.empty() && v.back() == '\''; }

inline Var post_of(const Var &pre) { return pre + "'"; }

inline Var pre_of(const Var &post) {
  if (!is_post(post)) throw LogicError("not a post-variable: " + post);
  return post.substr(0, post.size() - 1);
}

inline Var indexed(const Var &base, long i) {
  return base + "@" + std::to_string(i);
}

inline Var step_extra(const Var &base, long i) {
  return base + "@e" + std::to_string(i);
}

inline Var step_id(long i) { return "!id@" + std::to_string(i); }

inline bool is_generated(const Var &v) {
  return v.find('@') != Var::npos || v.find('%') != Var::npos ||
         (!v.empty() && v.front() == '!');
}

inline bool is_indexed(const Var &v) {
  auto at = v.find('@');
  if (at == Var::npos || at + 1 >= v.size() || v.front() == '!') return false;
  return std::isdigit(static_cast<unsigned char>(v[at + 1]));
}

// indexed("x", i) -> {"x", i}; throws on anything else
inline std::pair<Var, long> split_indexed(const Var &v) {
  if (!is_indexed(v)) throw LogicError("not an indexed variable: " + v);
  auto at = v.find('@');
  return {v.substr(0, at), std::stol(v.substr(at + 1))};
}

// Creation ordinal of a generated extra, used to order eliminations
// (later-created extras tend to carry defining equalities). Returns -1 for
// user-named variables.
inline long extra_ordinal(const Var &v) {
  auto p = v.rfind('%');
  if (p == Var::npos || p + 1 >= v.size()) return -1;
  return std::stol(v.substr(p + 1));
}

}  // namespace trl
