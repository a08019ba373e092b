#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "accel.hpp"
#include "problem.hpp"
#include "sexpr.hpp"
#include "smtlib.hpp"

namespace trl {

// Linear CHC frontend: an SMT-LIB 2 HORN script over Int predicates is
// encoded as one safety problem with a location variable (dense codes 1..m
// in declaration order) and a shared argument vector sized by the maximal
// arity. Facts become init disjuncts, rules rel disjuncts, queries err
// disjuncts.

struct ChcClause {
  std::optional<std::pair<long, std::vector<Term>>> body;  // predicate, args
  Formula constraint = Formula::tt();
  std::optional<std::pair<long, std::vector<Term>>> head;  // none = false
  long line{0};
  long col{0};
};

struct ChcSystem {
  std::vector<std::string> preds;  // declaration order; codes are index+1
  std::vector<long> arity;
  std::vector<ChcClause> clauses;

  long code_of(const std::string &name) const {
    for (std::size_t i = 0; i < preds.size(); ++i)
      if (preds[i] == name) return static_cast<long>(i) + 1;
    return 0;
  }

  long max_arity() const {
    long m = 0;
    for (long a : arity) m = std::max(m, a);
    return m;
  }
};

namespace detail {

// one clause's bound variables are renamed apart with a per-clause prefix
inline Var chc_rename(const std::map<Var, Var> &bound, const Var &v) {
  auto it = bound.find(v);
  return it == bound.end() ? v : it->second;
}

inline ChcClause parse_chc_clause(const ChcSystem &sys, const Sexp &e,
                                  long clause_index) {
  ChcClause c;
  c.line = e.line;
  c.col = e.col;
  std::map<Var, Var> bound;
  const Sexp *body = &e;
  if (!e.is_atom && !e.kids.empty() && e.at(0).is_atom &&
      e.at(0).atom == "forall") {
    for (const auto &b : e.at(1).kids) {
      if (b.is_atom || b.kids.size() != 2 || !b.at(1).is_atom ||
          b.at(1).atom != "Int")
        throw ParseError("only Int-sorted bound variables are supported",
                         b.line, b.col);
      bound[b.at(0).atom] =
          "c" + std::to_string(clause_index) + "." + b.at(0).atom;
    }
    body = &e.at(2);
  }

  auto rename = [&](const Var &v) { return chc_rename(bound, v); };
  auto pred_app = [&](const Sexp &s)
      -> std::optional<std::pair<long, std::vector<Term>>> {
    const Sexp &sym = s.is_atom ? s : s.at(0);
    if (!sym.is_atom) return std::nullopt;
    long code = sys.code_of(sym.atom);
    if (code == 0) return std::nullopt;
    std::vector<Term> args;
    if (!s.is_atom)
      for (std::size_t i = 1; i < s.kids.size(); ++i)
        args.push_back(parse_smt_term(s.at(i)).rename(rename));
    if (static_cast<long>(args.size()) != sys.arity[code - 1])
      throw ParseError("wrong arity for predicate " + sym.atom, s.line, s.col);
    return std::make_pair(code, std::move(args));
  };

  const Sexp *premise = nullptr;
  const Sexp *conclusion = body;
  if (!body->is_atom && !body->kids.empty() && body->at(0).is_atom &&
      body->at(0).atom == "=>") {
    if (body->kids.size() != 3)
      throw ParseError("clause implication must be binary", body->line,
                       body->col);
    premise = &body->at(1);
    conclusion = &body->at(2);
  }

  // premise: top-level conjunction of at most one predicate application
  // plus constraints
  std::vector<Formula> constraints;
  if (premise) {
    std::vector<const Sexp *> parts;
    if (!premise->is_atom && !premise->kids.empty() &&
        premise->at(0).is_atom && premise->at(0).atom == "and") {
      for (const auto &k : premise->kids)
        if (&k != &premise->kids.front()) parts.push_back(&k);
    } else {
      parts.push_back(premise);
    }
    for (const Sexp *part : parts) {
      if (auto app = pred_app(*part)) {
        if (c.body)
          throw ParseError("non-linear clause (two body predicates)",
                           part->line, part->col);
        c.body = std::move(app);
        continue;
      }
      constraints.push_back(parse_smt_formula(*part).rename(rename));
    }
  }
  c.constraint = Formula::conj(std::move(constraints));

  if (conclusion->is_atom && conclusion->atom == "false") {
    c.head = std::nullopt;
  } else if (auto app = pred_app(*conclusion)) {
    c.head = std::move(app);
  } else {
    throw ParseError("clause head must be a predicate or false",
                     conclusion->line, conclusion->col);
  }
  if (!c.body && !c.head)
    throw ParseError("clause with neither body nor head predicate", e.line,
                     e.col);
  return c;
}

}  // namespace detail

inline ChcSystem parse_chc_system(const std::string &text) {
  SexpReader rd(text);
  ChcSystem sys;
  std::vector<const Sexp *> asserts;
  std::vector<Sexp> cmds = rd.all();
  for (const auto &e : cmds) {
    if (e.is_atom || e.kids.empty() || !e.at(0).is_atom)
      throw ParseError("expected a command", e.line, e.col);
    const std::string &op = e.at(0).atom;
    if (op == "set-logic" || op == "set-info" || op == "set-option" ||
        op == "check-sat" || op == "get-model" || op == "exit")
      continue;
    if (op == "declare-fun") {
      const Sexp &args = e.at(2);
      const Sexp &res = e.at(3);
      if (!res.is_atom || res.atom != "Bool")
        throw ParseError("only Bool-valued predicates are supported", res.line,
                         res.col);
      for (const auto &a : args.kids)
        if (!a.is_atom || a.atom != "Int")
          throw ParseError("only Int predicate arguments are supported",
                           a.line, a.col);
      sys.preds.push_back(e.at(1).atom);
      sys.arity.push_back(static_cast<long>(args.kids.size()));
      continue;
    }
    if (op == "assert") continue;  // second pass, after all declarations
    throw ParseError("unsupported command '" + op + "'", e.line, e.col);
  }
  long idx = 0;
  for (const auto &e : cmds)
    if (!e.is_atom && !e.kids.empty() && e.at(0).is_atom &&
        e.at(0).atom == "assert")
      sys.clauses.push_back(detail::parse_chc_clause(sys, e.at(1), idx++));
  return sys;
}

inline SafetyProblem chc_to_problem(const ChcSystem &sys) {
  SafetyProblem p;
  p.vars.push_back("loc");
  long a = sys.max_arity();
  for (long k = 0; k < a; ++k) p.vars.push_back("a" + std::to_string(k));

  std::set<Var> keep(p.vars.begin(), p.vars.end());
  auto eq = [](Term lhs, Term rhs) {
    return Formula::lit(Literal::eq(std::move(lhs), std::move(rhs)));
  };
  auto slots = [&](const std::vector<Term> &args, bool post) {
    std::vector<Formula> out;
    for (std::size_t k = 0; k < args.size(); ++k) {
      Var v = "a" + std::to_string(k);
      out.push_back(eq(Term::var(post ? post_of(v) : v), args[k]));
    }
    return out;
  };
  // facts and queries must close over the state variables: clause variables
  // are eliminated by equality propagation or the clause is rejected
  auto ground = [&](std::vector<Formula> kids, const ChcClause &c) {
    auto lits = detail::propagate_equalities(Formula::conj(std::move(kids)), keep);
    if (!lits)
      throw ParseError(
          "cannot eliminate clause variables (unsupported fact/query shape)",
          c.line, c.col);
    std::vector<Formula> out;
    for (const auto &l : *lits) out.push_back(Formula::lit(l));
    return Formula::conj(std::move(out));
  };

  std::vector<Formula> init, rel, err;
  for (const auto &c : sys.clauses) {
    if (c.body && c.head) {  // rule
      std::vector<Formula> kids;
      kids.push_back(eq(Term::var("loc"), Term(c.body->first)));
      for (auto &f : slots(c.body->second, false)) kids.push_back(f);
      kids.push_back(c.constraint);
      kids.push_back(eq(Term::var(post_of(Var("loc"))), Term(c.head->first)));
      for (auto &f : slots(c.head->second, true)) kids.push_back(f);
      rel.push_back(Formula::conj(std::move(kids)));
    } else if (c.head) {  // fact
      std::vector<Formula> kids = slots(c.head->second, false);
      kids.push_back(c.constraint);
      init.push_back(eq(Term::var("loc"), Term(c.head->first)) &&
                     ground(std::move(kids), c));
    } else {  // query
      std::vector<Formula> kids = slots(c.body->second, false);
      kids.push_back(c.constraint);
      err.push_back(eq(Term::var("loc"), Term(c.body->first)) &&
                    ground(std::move(kids), c));
    }
  }
  p.init = Formula::disj(std::move(init));
  p.rel = Formula::disj(std::move(rel));
  p.err = Formula::disj(std::move(err));
  p.validate();
  return p;
}

inline SafetyProblem parse_chc(const std::string &text) {
  return chc_to_problem(parse_chc_system(text));
}

}  // namespace trl
