#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "trl/chc.hpp"
#include "trl/engine.hpp"
#include "trl/parse.hpp"
#include "trl/smtlib.hpp"

namespace {

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool ends_with(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_witness(const std::string &path, const trl::Witness &w) {
  std::ofstream out(path);
  for (const auto &state : w.states) {
    for (std::size_t i = 0; i < state.size(); ++i)
      out << (i ? " " : "") << state[i].get_str();
    out << "\n";
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"TRL safety checker for linear-integer transition systems"};
  app.require_subcommand(1);

  std::string input, format = "auto", solver, log_path, witness_path;
  bool unsafety = false;
  long max_depth = 500;
  double timeout = 300.0;

  CLI::App *check = app.add_subcommand("check", "decide safety of a system");
  check->add_option("file", input, "input problem")->required();
  check->add_option("--format", format, "input format")
      ->check(CLI::IsMember({"auto", "native", "chc"}));
  check->add_flag("--unsafety", unsafety, "attempt acceleration-based refutation");
  check->add_option("--max-depth", max_depth, "unrolling depth cap")
      ->check(CLI::PositiveNumber);
  check->add_option("--timeout", timeout, "time budget in seconds")
      ->check(CLI::PositiveNumber);
  check->add_option("--solver", solver, "external SMT-LIB solver command");
  check->add_option("--log", log_path, "JSONL event log path");
  check->add_option("--witness", witness_path, "witness output path (unsafe only)");

  CLI::App *smt = app.add_subcommand(
      "smt", "SMT-LIB 2 (QF_LIA) read-eval-print loop over the embedded solver");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (smt->parsed()) {
    trl::run_smt_repl(std::cin, std::cout);
    return 0;
  }

  try {
    if (format == "auto")
      format = ends_with(input, ".smt2") ? "chc" : "native";
    std::string text = read_file(input);
    trl::SafetyProblem problem =
        format == "chc" ? trl::parse_chc(text) : trl::parse_native(text);

    trl::EngineConfig config;
    config.max_depth = max_depth;
    config.timeout_seconds = timeout;
    config.unsafety = unsafety;
    config.log_path = log_path;
    if (const char *env = std::getenv("TRL_SOLVER")) solver = env;
    if (!solver.empty())
      config.make_session = [solver] {
        return std::unique_ptr<trl::SolverSession>(
            new trl::SmtLibSession(solver));
      };

    trl::Engine engine(std::move(problem), std::move(config));
    trl::Verdict v = engine.run();

    bool chc = format == "chc";
    switch (v.kind) {
      case trl::VerdictKind::Safe:
        std::cout << (chc ? "sat" : "safe") << "\n";
        break;
      case trl::VerdictKind::Unsafe:
        std::cout << (chc ? "unsat" : "unsafe") << "\n";
        if (!witness_path.empty() && v.witness)
          write_witness(witness_path, *v.witness);
        break;
      case trl::VerdictKind::Unknown:
        std::cout << "unknown\n";
        std::cerr << v.reason << "\n";
        break;
    }
    return 0;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
