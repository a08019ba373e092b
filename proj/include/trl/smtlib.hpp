#pragma once

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "sexpr.hpp"
#include "solver.hpp"

namespace trl {

// SMT-LIB 2 (QF_LIA) serialization, a session backed by an external solver
// process, and a small server loop that exposes the embedded solver over the
// same protocol.

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

inline std::string smt_symbol(const Var &v) {
  bool simple = !v.empty() && !std::isdigit(static_cast<unsigned char>(v[0]));
  for (char c : v)
    if (!std::isalnum(static_cast<unsigned char>(c)) &&
        std::string("~!@$%^&*_+=<>.?/-").find(c) == std::string::npos)
      simple = false;
  return simple ? v : "|" + v + "|";
}

inline std::string smt_int(const Int &n) {
  return n < 0 ? "(- " + Int(-n).get_str() + ")" : n.get_str();
}

inline std::string smt_term(const Term &t) {
  std::vector<std::string> parts;
  for (const auto &[v, c] : t.coeffs())
    parts.push_back(c == 1 ? smt_symbol(v)
                           : "(* " + smt_int(c) + " " + smt_symbol(v) + ")");
  if (t.constant() != 0 || parts.empty()) parts.push_back(smt_int(t.constant()));
  if (parts.size() == 1) return parts[0];
  std::string s = "(+";
  for (const auto &p : parts) s += " " + p;
  return s + ")";
}

// Formula printer. Divisibility has no quantifier-free SMT-LIB encoding
// without help, so e | t becomes t = e*q with a fresh quotient variable; the
// variables minted while printing are collected for declaration.
class SmtPrinter {
 public:
  std::string print(const Formula &phi) {
    switch (phi.kind()) {
      case Formula::Kind::Lit: return print(phi.literal());
      case Formula::Kind::And: return print_junction("and", "true", phi);
      case Formula::Kind::Or: return print_junction("or", "false", phi);
    }
    throw LogicError("unreachable");
  }

  std::string print(const Literal &l) {
    std::string t = smt_term(l.term());
    switch (l.kind()) {
      case Literal::Kind::Cmp:
        switch (l.rel()) {
          case Rel::Le: return "(<= " + t + " 0)";
          case Rel::Ge: return "(>= " + t + " 0)";
          case Rel::Eq: return "(= " + t + " 0)";
          case Rel::Ne: return "(distinct " + t + " 0)";
        }
        break;
      case Literal::Kind::Div: {
        Var q = fresh_extra(".q");
        minted_.push_back(q);
        return "(= " + t + " (* " + smt_int(l.modulus()) + " " +
               smt_symbol(q) + "))";
      }
      case Literal::Kind::NotDiv: {
        Var q = fresh_extra(".q");
        Var r = fresh_extra(".r");
        minted_.push_back(q);
        minted_.push_back(r);
        std::string e = smt_int(l.modulus());
        std::string qs = smt_symbol(q), rs = smt_symbol(r);
        return "(and (= " + t + " (+ (* " + e + " " + qs + ") " + rs +
               ")) (>= " + rs + " 1) (<= " + rs + " (- " + e + " 1)))";
      }
    }
    throw LogicError("unreachable");
  }

  const std::vector<Var> &minted() const { return minted_; }

 private:
  std::string print_junction(const char *op, const char *empty,
                             const Formula &phi) {
    if (phi.children().empty()) return empty;
    std::string s = "(";
    s += op;
    for (const auto &k : phi.children()) s += " " + print(k);
    return s + ")";
  }

  std::vector<Var> minted_;
};

// ---------------------------------------------------------------------------
// parsing (terms and formulas of the QF_LIA subset we emit)
// ---------------------------------------------------------------------------

inline bool is_numeral(const std::string &s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline Term parse_smt_term(const Sexp &e) {
  if (e.is_atom) {
    if (is_numeral(e.atom)) return Term(Int(e.atom));
    if (e.atom.size() > 1 && e.atom[0] == '-' && is_numeral(e.atom.substr(1)))
      return Term(Int(e.atom));
    return Term::var(e.atom);
  }
  if (e.kids.empty()) throw ParseError("empty term", e.line, e.col);
  const Sexp &head = e.at(0);
  if (!head.is_atom) throw ParseError("expected operator", head.line, head.col);
  if (head.atom == "+") {
    Term t(0);
    for (std::size_t i = 1; i < e.kids.size(); ++i) t += parse_smt_term(e.at(i));
    return t;
  }
  if (head.atom == "-") {
    if (e.kids.size() < 2) throw ParseError("'-' needs arguments", e.line, e.col);
    Term t = parse_smt_term(e.at(1));
    if (e.kids.size() == 2) return -t;
    for (std::size_t i = 2; i < e.kids.size(); ++i) t -= parse_smt_term(e.at(i));
    return t;
  }
  if (head.atom == "*") {
    Term t(1);
    for (std::size_t i = 1; i < e.kids.size(); ++i) {
      Term f = parse_smt_term(e.at(i));
      if (t.is_constant())
        t = f * t.constant();
      else if (f.is_constant())
        t = t * f.constant();
      else
        throw ParseError("nonlinear multiplication", e.line, e.col);
    }
    return t;
  }
  throw ParseError("unknown term operator '" + head.atom + "'", e.line, e.col);
}

inline Formula parse_smt_formula(const Sexp &e) {
  if (e.is_atom) {
    if (e.atom == "true") return Formula::tt();
    if (e.atom == "false") return Formula::ff();
    throw ParseError("expected a formula, got '" + e.atom + "'", e.line, e.col);
  }
  if (e.kids.empty()) throw ParseError("empty formula", e.line, e.col);
  const Sexp &head = e.at(0);
  // ((_ divisible e) t)
  if (!head.is_atom) {
    if (head.kids.size() == 3 && head.at(0).is_atom && head.at(0).atom == "_" &&
        head.at(1).is_atom && head.at(1).atom == "divisible" &&
        head.at(2).is_atom && is_numeral(head.at(2).atom))
      return Formula::lit(
          Literal::divi(Int(head.at(2).atom), parse_smt_term(e.at(1))));
    throw ParseError("unknown operator", head.line, head.col);
  }
  const std::string &op = head.atom;
  if (op == "and" || op == "or") {
    std::vector<Formula> kids;
    for (std::size_t i = 1; i < e.kids.size(); ++i)
      kids.push_back(parse_smt_formula(e.at(i)));
    return op == "and" ? Formula::conj(std::move(kids))
                       : Formula::disj(std::move(kids));
  }
  if (op == "not") {
    if (e.kids.size() != 2) throw ParseError("'not' is unary", e.line, e.col);
    return parse_smt_formula(e.at(1)).negate_nnf();
  }
  if (op == "=>") {
    if (e.kids.size() < 3)
      throw ParseError("'=>' needs two arguments", e.line, e.col);
    std::vector<Formula> kids;
    for (std::size_t i = 1; i + 1 < e.kids.size(); ++i)
      kids.push_back(parse_smt_formula(e.at(i)).negate_nnf());
    kids.push_back(parse_smt_formula(e.at(e.kids.size() - 1)));
    return Formula::disj(std::move(kids));
  }
  if (op == "=" || op == "distinct" || op == "<=" || op == "<" || op == ">=" ||
      op == ">") {
    if (e.kids.size() < 3)
      throw ParseError("'" + op + "' needs two arguments", e.line, e.col);
    std::vector<Formula> kids;
    for (std::size_t i = 1; i + 1 < e.kids.size(); ++i) {
      Term a = parse_smt_term(e.at(i));
      Term b = parse_smt_term(e.at(i + 1));
      Literal l = op == "="          ? Literal::eq(a, b)
                  : op == "distinct" ? Literal::ne(a, b)
                  : op == "<="       ? Literal::le(a, b)
                  : op == "<"        ? Literal::lt(a, b)
                  : op == ">="       ? Literal::ge(a, b)
                                     : Literal::gt(a, b);
      kids.push_back(Formula::lit(l));
    }
    return Formula::conj(std::move(kids));
  }
  throw ParseError("unknown operator '" + op + "'", e.line, e.col);
}

// ---------------------------------------------------------------------------
// external solver session
// ---------------------------------------------------------------------------

class SmtLibSession : public SolverSession {
 public:
  explicit SmtLibSession(const std::string &command) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw LogicError("cannot create solver pipes");
    pid_ = fork();
    if (pid_ < 0) throw LogicError("cannot fork solver process");
    if (pid_ == 0) {
      dup2(to_child[0], 0);
      dup2(from_child[1], 1);
      close(to_child[0]); close(to_child[1]);
      close(from_child[0]); close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    out_ = fdopen(to_child[1], "w");
    in_ = fdopen(from_child[0], "r");
    if (!out_ || !in_) throw LogicError("cannot open solver streams");
    frames_.emplace_back();
    send("(set-logic QF_LIA)");
  }

  ~SmtLibSession() override {
    if (out_) {
      std::fputs("(exit)\n", out_);
      std::fflush(out_);
      std::fclose(out_);
    }
    if (in_) std::fclose(in_);
    if (pid_ > 0) waitpid(pid_, nullptr, 0);
  }

  SmtLibSession(const SmtLibSession &) = delete;
  SmtLibSession &operator=(const SmtLibSession &) = delete;

  void declare(const Var &v) override {
    if (declared(v)) return;
    frames_.back().insert(v);
    send("(declare-const " + smt_symbol(v) + " Int)");
  }

  void assert_formula(const Formula &phi) override {
    for (const auto &v : phi.variables()) declare(v);
    SmtPrinter p;
    std::string body = p.print(phi);
    for (const auto &q : p.minted()) declare(q);
    send("(assert " + body + ")");
    has_model_ = false;
  }

  void push() override {
    send("(push 1)");
    frames_.emplace_back();
  }

  void pop() override {
    if (frames_.size() <= 1) throw LogicError("pop on empty solver stack");
    send("(pop 1)");
    frames_.pop_back();
    has_model_ = false;
  }

  SatResult check_sat() override {
    send("(check-sat)");
    std::string r = read_line();
    if (r == "sat") {
      has_model_ = true;
      return SatResult::Sat;
    }
    has_model_ = false;
    if (r == "unsat") return SatResult::Unsat;
    throw LogicError("solver returned '" + r + "' to check-sat");
  }

  Valuation get_model() override {
    if (!has_model_) throw LogicError("get_model without preceding sat check");
    std::vector<Var> vars;
    for (const auto &fr : frames_) vars.insert(vars.end(), fr.begin(), fr.end());
    Valuation m;
    if (vars.empty()) return m;
    std::string q = "(get-value (";
    for (std::size_t i = 0; i < vars.size(); ++i)
      q += (i ? " " : "") + smt_symbol(vars[i]);
    q += "))";
    send(q);
    Sexp reply = read_sexp();
    if (reply.is_atom)
      throw LogicError("solver returned '" + reply.atom + "' to get-value");
    for (const auto &entry : reply.kids) {
      if (entry.is_atom || entry.kids.size() != 2)
        throw LogicError("malformed get-value entry");
      Term t = parse_smt_term(entry.at(1));
      if (!t.is_constant()) throw LogicError("non-constant model value");
      m.set(entry.at(0).atom, t.constant());
    }
    for (const auto &v : vars)
      if (!m.has(v)) m.set(v, 0);
    return m;
  }

 private:
  bool declared(const Var &v) const {
    for (const auto &fr : frames_)
      if (fr.count(v)) return true;
    return false;
  }

  void send(const std::string &line) {
    std::fputs(line.c_str(), out_);
    std::fputc('\n', out_);
    std::fflush(out_);
  }

  // next nonempty line (replies may leave a dangling newline behind)
  std::string read_line() {
    std::string s;
    int c;
    while ((c = std::fgetc(in_)) != EOF) {
      if (c == '\n') {
        if (!s.empty()) return s;
        continue;
      }
      s += char(c);
    }
    if (s.empty()) throw LogicError("solver process closed its output");
    return s;
  }

  // one balanced s-expression (the get-value reply may span lines)
  Sexp read_sexp() {
    std::string buf;
    long depth = 0;
    bool seen = false;
    int c;
    while ((c = std::fgetc(in_)) != EOF) {
      buf += char(c);
      if (c == '(') { ++depth; seen = true; }
      if (c == ')') --depth;
      if (seen && depth == 0) break;
      if (!seen && c == '\n' && buf.find_first_not_of(" \t\r\n") != std::string::npos)
        break;  // bare-atom reply (e.g. an error token)
    }
    SexpReader rd(buf);
    auto s = rd.next();
    if (!s) throw LogicError("empty solver reply");
    return *s;
  }

  pid_t pid_{-1};
  std::FILE *out_{nullptr};
  std::FILE *in_{nullptr};
  std::vector<std::set<Var>> frames_;
  bool has_model_{false};
};

// ---------------------------------------------------------------------------
// server: the embedded solver speaking the same protocol
// ---------------------------------------------------------------------------

// Reads SMT-LIB commands from `in` until (exit) or end of input. Implements
// exactly the subset the session above emits, plus a few conveniences.
inline void run_smt_repl(std::istream &in, std::ostream &out) {
  EmbeddedSession session;
  std::set<Var> declared;
  bool sat_known = false;

  auto read_command = [&]() -> std::optional<std::string> {
    std::string buf;
    long depth = 0;
    bool seen = false;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == ';') {  // comment to end of line
        while ((c = in.get()) != EOF && c != '\n') {}
        continue;
      }
      buf += char(c);
      if (c == '(') { ++depth; seen = true; }
      if (c == ')') --depth;
      if (seen && depth == 0) return buf;
    }
    return std::nullopt;
  };

  while (auto cmd = read_command()) {
    Sexp e;
    try {
      SexpReader rd(*cmd);
      auto s = rd.next();
      if (!s) continue;
      e = *s;
      if (e.is_atom || e.kids.empty() || !e.at(0).is_atom)
        throw ParseError("expected a command", e.line, e.col);
      const std::string &op = e.at(0).atom;
      if (op == "exit") return;
      if (op == "set-logic" || op == "set-info" || op == "set-option") continue;
      if (op == "echo") {
        std::string s2 = e.at(1).atom;
        if (s2.size() >= 2 && s2.front() == '"') s2 = s2.substr(1, s2.size() - 2);
        out << s2 << "\n" << std::flush;
        continue;
      }
      if (op == "declare-const" || op == "declare-fun") {
        const Sexp &name = e.at(1);
        if (op == "declare-fun" && !e.at(2).kids.empty())
          throw ParseError("only 0-ary functions are supported", e.line, e.col);
        declared.insert(name.atom);
        session.declare(name.atom);
        continue;
      }
      if (op == "assert") {
        session.assert_formula(parse_smt_formula(e.at(1)));
        sat_known = false;
        continue;
      }
      if (op == "push" || op == "pop") {
        long n = e.kids.size() > 1 ? std::stol(e.at(1).atom) : 1;
        for (long i = 0; i < n; ++i) op == "push" ? session.push() : session.pop();
        sat_known = false;
        continue;
      }
      if (op == "check-sat") {
        SatResult r = session.check_sat();
        sat_known = r == SatResult::Sat;
        out << (r == SatResult::Sat ? "sat" : "unsat") << "\n" << std::flush;
        continue;
      }
      if (op == "get-value") {
        if (!sat_known) throw LogicError("get-value without preceding sat");
        Valuation m = session.get_model();
        std::string reply = "(";
        const Sexp &args = e.at(1);
        for (std::size_t i = 0; i < args.kids.size(); ++i) {
          const Var &v = args.at(i).atom;
          Int val = m.has(v) ? m.get(v) : Int(0);
          if (i) reply += " ";
          reply += "(" + smt_symbol(v) + " " + smt_int(val) + ")";
        }
        out << reply << ")\n" << std::flush;
        continue;
      }
      throw ParseError("unknown command '" + op + "'", e.line, e.col);
    } catch (const std::exception &ex) {
      out << "(error \"" << ex.what() << "\")\n" << std::flush;
    }
  }
}

}  // namespace trl
