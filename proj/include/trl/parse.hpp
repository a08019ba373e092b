#pragma once

#include <string>
#include <vector>

#include "problem.hpp"
#include "sexpr.hpp"
#include "smtlib.hpp"

namespace trl {

// Native problem format:
//
//   vars: w x y
//   init: (and (= x 0) (= y 0))
//   rel:  (or ...)
//   err:  (and (= w 1) (<= x 0) (> y 0))
//
// Formulas are s-expressions over and/or/not, <=, <, >=, >, =, !=,
// (divides e t), integer literals and variables; primed names are
// post-variables. Comments run from ';' to end of line.

namespace detail {

inline Formula parse_native_formula(const Sexp &e) {
  if (e.is_atom) {
    if (e.atom == "true") return Formula::tt();
    if (e.atom == "false") return Formula::ff();
    throw ParseError("expected a formula, got '" + e.atom + "'", e.line, e.col);
  }
  if (e.kids.empty() || !e.at(0).is_atom)
    throw ParseError("expected an operator", e.line, e.col);
  const std::string &op = e.at(0).atom;
  if (op == "and" || op == "or") {
    std::vector<Formula> kids;
    for (std::size_t i = 1; i < e.kids.size(); ++i)
      kids.push_back(parse_native_formula(e.at(i)));
    return op == "and" ? Formula::conj(std::move(kids))
                       : Formula::disj(std::move(kids));
  }
  if (op == "not") {
    if (e.kids.size() != 2) throw ParseError("'not' is unary", e.line, e.col);
    return parse_native_formula(e.at(1)).negate_nnf();
  }
  if (op == "divides") {
    if (e.kids.size() != 3)
      throw ParseError("'divides' needs a modulus and a term", e.line, e.col);
    if (!e.at(1).is_atom || !is_numeral(e.at(1).atom))
      throw ParseError("modulus must be a positive integer", e.at(1).line,
                       e.at(1).col);
    return Formula::lit(Literal::divi(Int(e.at(1).atom), parse_smt_term(e.at(2))));
  }
  if (op == "=" || op == "!=" || op == "<=" || op == "<" || op == ">=" ||
      op == ">") {
    if (e.kids.size() != 3)
      throw ParseError("'" + op + "' needs two arguments", e.line, e.col);
    Term a = parse_smt_term(e.at(1));
    Term b = parse_smt_term(e.at(2));
    Literal l = op == "="    ? Literal::eq(a, b)
                : op == "!=" ? Literal::ne(a, b)
                : op == "<=" ? Literal::le(a, b)
                : op == "<"  ? Literal::lt(a, b)
                : op == ">=" ? Literal::ge(a, b)
                             : Literal::gt(a, b);
    return Formula::lit(l);
  }
  throw ParseError("unknown operator '" + op + "'", e.line, e.col);
}

inline void check_native_vars(const Formula &phi, const SafetyProblem &p,
                              bool relational, const Sexp &where) {
  for (const auto &v : phi.variables()) {
    if (p.is_state_var(v)) continue;
    if (is_post(v)) {
      if (relational && p.is_state_var(pre_of(v))) continue;
      throw ParseError(relational
                           ? "post-variable of undeclared name: " + v
                           : "post-variable not allowed here: " + v,
                       where.line, where.col);
    }
    if (relational) continue;  // extras are allowed in rel only
    throw ParseError("undeclared variable: " + v, where.line, where.col);
  }
}

}  // namespace detail

inline SafetyProblem parse_native(const std::string &text) {
  SexpReader rd(text);
  std::vector<Sexp> toks = rd.all();
  std::size_t i = 0;
  auto expect = [&](const std::string &kw) -> const Sexp & {
    if (i >= toks.size())
      throw ParseError("expected '" + kw + "'", 0, 0);
    if (!toks[i].is_atom || toks[i].atom != kw)
      throw ParseError("expected '" + kw + "'", toks[i].line, toks[i].col);
    return toks[i++];
  };

  SafetyProblem p;
  expect("vars:");
  while (i < toks.size() && toks[i].is_atom && toks[i].atom != "init:") {
    const Sexp &v = toks[i++];
    if (is_generated(v.atom) || is_post(v.atom))
      throw ParseError("illegal variable name: " + v.atom, v.line, v.col);
    p.vars.push_back(v.atom);
  }
  if (p.vars.empty()) throw ParseError("no variables declared", 1, 1);

  expect("init:");
  const Sexp &einit = i < toks.size() ? toks[i++]
                                      : throw ParseError("missing init formula", 0, 0);
  p.init = detail::parse_native_formula(einit);
  detail::check_native_vars(p.init, p, false, einit);

  expect("rel:");
  const Sexp &erel = i < toks.size() ? toks[i++]
                                     : throw ParseError("missing rel formula", 0, 0);
  p.rel = detail::parse_native_formula(erel);
  detail::check_native_vars(p.rel, p, true, erel);

  expect("err:");
  const Sexp &eerr = i < toks.size() ? toks[i++]
                                     : throw ParseError("missing err formula", 0, 0);
  p.err = detail::parse_native_formula(eerr);
  detail::check_native_vars(p.err, p, false, eerr);

  if (i < toks.size())
    throw ParseError("trailing input", toks[i].line, toks[i].col);
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string native_term(const Term &t) {
  std::vector<std::string> parts;
  for (const auto &[v, c] : t.coeffs())
    parts.push_back(c == 1 ? v : "(* " + smt_int(c) + " " + v + ")");
  if (t.constant() != 0 || parts.empty())
    parts.push_back(smt_int(t.constant()));
  if (parts.size() == 1) return parts[0];
  std::string s = "(+";
  for (const auto &q : parts) s += " " + q;
  return s + ")";
}

inline std::string native_formula(const Formula &phi) {
  switch (phi.kind()) {
    case Formula::Kind::Lit: {
      const Literal &l = phi.literal();
      std::string t = native_term(l.term());
      switch (l.kind()) {
        case Literal::Kind::Cmp: {
          const char *op = l.rel() == Rel::Le   ? "<="
                           : l.rel() == Rel::Ge ? ">="
                           : l.rel() == Rel::Eq ? "="
                                                : "!=";
          return std::string("(") + op + " " + t + " 0)";
        }
        case Literal::Kind::Div:
          return "(divides " + l.modulus().get_str() + " " + t + ")";
        case Literal::Kind::NotDiv:
          return "(not (divides " + l.modulus().get_str() + " " + t + "))";
      }
      throw LogicError("unreachable");
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      if (phi.children().empty())
        return phi.kind() == Formula::Kind::And ? "true" : "false";
      std::string s = phi.kind() == Formula::Kind::And ? "(and" : "(or";
      for (const auto &k : phi.children()) s += " " + native_formula(k);
      return s + ")";
    }
  }
  throw LogicError("unreachable");
}

}  // namespace detail

inline std::string print_native(const SafetyProblem &p) {
  std::string s = "vars:";
  for (const auto &v : p.vars) s += " " + v;
  s += "\ninit: " + detail::native_formula(p.init);
  s += "\nrel: " + detail::native_formula(p.rel);
  s += "\nerr: " + detail::native_formula(p.err);
  return s + "\n";
}

}  // namespace trl
