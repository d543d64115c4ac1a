// kinreal: sparse and dense weakly reversible realizations of mass-action
// systems up to linear conjugacy.
//
// Exit codes: 0 verified result, 1 I/O or parse error, 2 infeasible,
// 3 time limit reached, 4 audit failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "kinreal/kinreal.hpp"

namespace {

using namespace kinreal;

enum Exit : int { kOk = 0, kInputError = 1, kInfeasible = 2, kLimit = 3, kAuditFailed = 4 };

constexpr const char* kConfigEnv = "KINREAL_CONFIG";

struct ProblemFlags {
  bool sparse = false;
  bool dense = false;
  bool wr = false;
  std::string conjugacy;
  std::string epsilon;
  std::string epsilon_c;
  std::string ubound;
  std::string complexes;
  std::string config;
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& f) {
  auto* sparse = cmd->add_flag("--sparse", f.sparse, "Minimize the number of reactions (default)");
  auto* dense = cmd->add_flag("--dense", f.dense, "Maximize the number of reactions");
  sparse->excludes(dense);
  cmd->add_flag("--wr", f.wr, "Require a weakly reversible network");
  cmd->add_option("--conjugacy", f.conjugacy, "identity or scaling (default identity)")
      ->check(CLI::IsMember({"identity", "scaling"}));
  cmd->add_option("--epsilon", f.epsilon, "Smallest rate of a present reaction, number or p/q (default 0.1)");
  cmd->add_option("--epsilon-c", f.epsilon_c, "Scaling bounds [eps_c, 1/eps_c] (default epsilon)");
  cmd->add_option("--ubound", f.ubound, "Rate upper bound: a number or a matrix file (default 20)");
  cmd->add_option("--complexes", f.complexes, "File listing complexes to include, in column order");
  cmd->add_option("--config", f.config,
                  std::string("Problem config JSON (default: $") + kConfigEnv + ")");
}

double real_flag(const char* name, const std::string& text) {
  const auto v = parse_real(text);
  if (!v) throw std::invalid_argument(std::string(name) + ": '" + text + "' is not a number or ratio");
  return *v;
}

ProblemSettings settings_from(const ProblemFlags& f) {
  ProblemSettings s;
  std::string config = f.config;
  if (config.empty()) {
    if (const char* env = std::getenv(kConfigEnv)) config = env;
  }
  if (!config.empty()) s = settings_from_json(parse_json(read_file(config)));
  if (f.sparse) s.objective = Objective::sparse;
  if (f.dense) s.objective = Objective::dense;
  if (f.wr) s.weakly_reversible = true;
  if (!f.conjugacy.empty()) {
    s.conjugacy = f.conjugacy == "scaling" ? Conjugacy::scaling : Conjugacy::identity;
  }
  if (!f.epsilon.empty()) s.epsilon = real_flag("--epsilon", f.epsilon);
  if (!f.epsilon_c.empty()) s.epsilon_c = real_flag("--epsilon-c", f.epsilon_c);
  if (!f.ubound.empty()) {
    if (const auto value = parse_real(f.ubound)) {
      s.u = *value;
      s.u_matrix.reset();
    } else {
      Matrix u = parse_matrix_text(read_file(f.ubound));
      u.diagonal().setZero();
      s.u_matrix = std::move(u);
    }
  }
  return s;
}

Realization load_input(const std::string& path, const ProblemFlags& f) {
  Realization r = load_realization(path);
  if (!f.complexes.empty()) {
    r = apply_complex_list(r, parse_complex_list(read_file(f.complexes), r.network.species()));
  }
  return r;
}

RealizationProblem build_problem(const Realization& r, const ProblemFlags& f) {
  return make_problem(r, settings_from(f));
}

Json report_header(const char* command) {
  return {{"tool", "kinreal"}, {"version", KINREAL_VERSION}, {"command", command}};
}

void print_failures(const AuditReport& audit) {
  for (const auto& c : audit.checks) {
    for (const auto& f : c.failures) std::cerr << "audit " << c.name << ": " << f << '\n';
  }
}

void print_result(const Network& conjugate, const Vector& c, const AuditReport& audit) {
  std::cout << render_network(conjugate);
  std::cout << "# c =";
  for (Eigen::Index i = 0; i < c.size(); ++i) std::cout << ' ' << detail::format_real(c(i));
  std::cout << "\n# reactions: " << conjugate.reactions().size()
            << ", weakly reversible: " << (is_weakly_reversible(conjugate).weakly_reversible ? "yes" : "no")
            << ", deficiency: " << deficiency(conjugate)
            << ", audit: " << (audit.passed ? "passed" : "FAILED") << '\n';
}

struct RealizeFlags {
  ProblemFlags problem;
  std::string input;
  std::string output;
  bool dot = false;
  std::string report = "text";
  double time_limit = 600.0;
  std::uint64_t seed = 42;
  std::string solver = "embedded";
  std::string lp_out;
  std::string lp_solution;
  std::optional<double> trajectory;
};

int cmd_realize(const RealizeFlags& f) {
  const Realization given = load_input(f.input, f.problem);
  const RealizationProblem p = build_problem(given, f.problem);
  Json report = report_header("realize");
  report["problem"] = problem_to_json(p);

  std::optional<DecodedRealization> decoded;
  milp::SolveStatus status = milp::SolveStatus::infeasible;
  if (f.solver == "lpfile") {
    const EncodedModel enc = encode(p);
    std::string lp_path = f.lp_out;
    if (lp_path.empty()) lp_path = (f.output.empty() ? std::string("model") : f.output) + ".lp";
    write_file(lp_path, milp::export_lp_file(enc.model));
    if (f.lp_solution.empty()) {
      std::cerr << "wrote " << lp_path << "; rerun with --lp-solution to import a solution\n";
      return kOk;
    }
    const auto values = milp::import_solution(enc.model, read_file(f.lp_solution));
    const auto check = milp::check_solution(enc.model, values, 1e-7);
    if (!check.feasible) {
      for (const auto& v : check.violations) std::cerr << "imported solution: " << v << '\n';
      return kAuditFailed;
    }
    try {
      decoded = decode(values, enc.vars, p);
    } catch (const std::logic_error& e) {
      std::cerr << "imported solution: " << e.what() << '\n';
      return kAuditFailed;
    }
    status = milp::SolveStatus::optimal;
    report["stages"] = Json::array();
  } else {
    RealizeOptions options;
    options.milp.time_limit_seconds = f.time_limit;
    RealizeOutcome out = realize(p, options);
    status = out.status;
    report["stages"] = stages_to_json(out.stages);
    decoded = std::move(out.decoded);
  }
  report["status"] = milp::to_string(status);

  if (!decoded) {
    if (!f.output.empty()) write_file(f.output + ".report.json", report.dump(2) + "\n");
    if (f.report == "json") std::cout << report.dump(2) << '\n';
    if (status == milp::SolveStatus::infeasible) {
      std::cerr << "infeasible: no network satisfies the constraints\n";
      return kInfeasible;
    }
    if (status == milp::SolveStatus::time_limit) {
      std::cerr << "time limit reached without a feasible network\n";
      return kLimit;
    }
    std::cerr << "solver returned " << milp::to_string(status) << '\n';
    return kAuditFailed;
  }

  const RealizationResult& r = decoded->result;
  AuditOptions audit_options;
  audit_options.seed = f.seed;
  const AuditReport audit = audit_solution(p, r, audit_options);
  const KineticsMatrix a_k_prime = apply_transform(r.A_b, r.c, p.Y);
  const Network conjugate = network_from_kinetics(decoded->network.species(), decoded->network.complexes(), a_k_prime);
  report["audit"] = audit_to_json(audit);
  report["reactions"] = conjugate.reactions().size();
  report["weakly_reversible"] = is_weakly_reversible(conjugate).weakly_reversible;
  report["deficiency"] = deficiency(conjugate);
  report["c"] = vector_to_json(r.c);
  if (f.trajectory) {
    const Vector x0 = Vector::Ones(p.Y.rows());
    const KineticsMatrix given_ak = build_Ak(given.network);
    report["trajectory"] = trajectory_to_json(trajectory_check(p.Y, given_ak, a_k_prime, r.c, x0, *f.trajectory));
  }

  if (!f.output.empty()) {
    write_file(f.output + ".report.json", report.dump(2) + "\n");
    if (audit.passed) {
      write_file(f.output + ".rxn", render_network(conjugate));
      write_file(f.output + ".json", solution_to_json(conjugate, r.c).dump(2) + "\n");
      if (f.dot) write_file(f.output + ".dot", to_dot(conjugate));
    }
  }
  if (!audit.passed) {
    print_failures(audit);
    if (f.report == "json") std::cout << report.dump(2) << '\n';
    return kAuditFailed;
  }
  if (f.report == "json") {
    std::cout << report.dump(2) << '\n';
  } else {
    print_result(conjugate, r.c, audit);
    if (f.dot && f.output.empty()) std::cout << to_dot(conjugate);
  }
  return status == milp::SolveStatus::optimal ? kOk : kLimit;
}

struct VerifyFlags {
  ProblemFlags problem;
  std::string input;
  std::string solution;
  std::string report = "text";
  std::uint64_t seed = 42;
  std::size_t samples = 100;
};

int cmd_verify(const VerifyFlags& f) {
  const Realization given = load_input(f.input, f.problem);
  const RealizationProblem p = build_problem(given, f.problem);
  const CandidateSolution candidate = solution_from_json(parse_json(read_file(f.solution)));
  if (candidate.network.species() != given.network.species()) {
    throw FormatError("solution species differ from the input's species");
  }
  const KineticsMatrix a_k_prime = kinetics_over(candidate.network, p.complexes());
  const KineticsMatrix a_b = remove_transform(a_k_prime, candidate.c, p.Y);
  const RealizationResult r = result_from(p, a_b, candidate.c);
  AuditOptions options;
  options.seed = f.seed;
  options.conjugacy_samples = f.samples;
  const AuditReport audit = audit_solution(p, r, options);

  Json report = report_header("verify");
  report["problem"] = problem_to_json(p);
  report["audit"] = audit_to_json(audit);
  if (f.report == "json") {
    std::cout << report.dump(2) << '\n';
  } else {
    for (const auto& c : audit.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (max residual "
                << detail::format_real(c.max_residual, 6) << ")\n";
    }
  }
  if (!audit.passed) {
    print_failures(audit);
    return kAuditFailed;
  }
  return kOk;
}

struct ExportFlags {
  ProblemFlags problem;
  std::string input;
  std::string output;
  bool dot = false;
  bool lp = false;
  bool json = false;
};

int cmd_export(const ExportFlags& f) {
  const Realization given = load_input(f.input, f.problem);
  std::string text;
  if (f.dot) {
    text = to_dot(given.network);
  } else if (f.lp) {
    text = milp::export_lp_file(encode(build_problem(given, f.problem)).model);
  } else {
    text = network_to_json(given.network).dump(2) + "\n";
  }
  if (f.output.empty()) {
    std::cout << text;
  } else {
    write_file(f.output, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly reversible realizations of mass-action systems under linear conjugacy"};
  app.set_version_flag("--version", std::string("kinreal ") + KINREAL_VERSION);
  app.require_subcommand(1);

  RealizeFlags rf;
  auto* realize_cmd = app.add_subcommand("realize", "Solve for a sparse or dense realization");
  realize_cmd->add_option("input", rf.input, "Reaction file, .ode polynomial system, or JSON")->required();
  add_problem_flags(realize_cmd, rf.problem);
  realize_cmd->add_option("-o,--output", rf.output, "Write PREFIX.rxn, PREFIX.json, PREFIX.report.json");
  realize_cmd->add_flag("--dot", rf.dot, "Also emit a DOT graph");
  realize_cmd->add_option("--report", rf.report, "Report format on stdout")->check(CLI::IsMember({"text", "json"}));
  realize_cmd->add_option("--time-limit", rf.time_limit, "Wall-clock limit in seconds (default 600)");
  realize_cmd->add_option("--seed", rf.seed, "Seed for the conjugacy sample points (default 42)");
  realize_cmd->add_option("--solver", rf.solver, "embedded or lpfile")->check(CLI::IsMember({"embedded", "lpfile"}));
  realize_cmd->add_option("--lp-out", rf.lp_out, "LP file path for --solver lpfile");
  realize_cmd->add_option("--lp-solution", rf.lp_solution, "Solution file ('name value' lines) to import");
  realize_cmd->add_option("--trajectory", rf.trajectory, "Also compare trajectories from x0 = 1 up to this time");

  VerifyFlags vf;
  auto* verify_cmd = app.add_subcommand("verify", "Audit a candidate conjugate network");
  verify_cmd->add_option("input", vf.input, "The given system")->required();
  verify_cmd->add_option("solution", vf.solution, "Solution JSON (network of A_k' plus \"c\")")->required();
  add_problem_flags(verify_cmd, vf.problem);
  verify_cmd->add_option("--report", vf.report, "Report format on stdout")->check(CLI::IsMember({"text", "json"}));
  verify_cmd->add_option("--seed", vf.seed, "Seed for the conjugacy sample points (default 42)");
  verify_cmd->add_option("--samples", vf.samples, "Number of conjugacy sample points (default 100)");

  ExportFlags ef;
  auto* export_cmd = app.add_subcommand("export", "Write a DOT graph, LP model, or network JSON");
  export_cmd->add_option("input", ef.input, "Reaction file, .ode polynomial system, or JSON")->required();
  add_problem_flags(export_cmd, ef.problem);
  auto* dot = export_cmd->add_flag("--dot", ef.dot, "Graphviz reaction graph");
  auto* lp = export_cmd->add_flag("--lp", ef.lp, "Encoded MILP in LP format");
  auto* json = export_cmd->add_flag("--json", ef.json, "Canonical network JSON");
  dot->excludes(lp)->excludes(json);
  lp->excludes(json);
  export_cmd->add_option("-o,--output", ef.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  if (export_cmd->parsed() && !ef.dot && !ef.lp && !ef.json) {
    std::cerr << "export: one of --dot, --lp, --json is required\n";
    return kInputError;
  }

  try {
    if (realize_cmd->parsed()) return cmd_realize(rf);
    if (verify_cmd->parsed()) return cmd_verify(vf);
    return cmd_export(ef);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kInputError;
}
