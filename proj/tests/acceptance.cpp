// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Tolerances and seeds are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kinreal/kinreal.hpp"

namespace kinreal {
namespace {

constexpr double kConjugacyTol = 1e-6;
constexpr std::size_t kConjugacySamples = 100;
constexpr std::uint64_t kSampleSeed = 42;
constexpr double kFeasibilityTol = 1e-7;
constexpr double kCanonicalTol = 1e-9;

using Edge = std::pair<std::size_t, std::size_t>;
using EdgeSet = std::set<Edge>;

struct Verdict {
  bool passed = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (passed) detail = what;
      passed = false;
    }
  }
};

// Shared by criterion 7: every solve made by the other criteria is recorded.
struct SolveRecord {
  std::string label;
  double residual = 0.0;
  bool identity = false;
  bool bitwise = true;
};
std::vector<SolveRecord> g_solves;

std::string data_path(const char* name) { return std::string(KINREAL_DATA_DIR) + "/" + name; }

Realization example1() { return with_matrices(parse_network(read_file(data_path("example1.rxn")))); }

Realization example_with_list(const char* ode, const char* list) {
  const Realization base = canonical_realization(parse_polysystem(read_file(data_path(ode))));
  return apply_complex_list(base, parse_complex_list(read_file(data_path(list)), base.network.species()));
}

EdgeSet edges_of(const Network& net) {
  EdgeSet out;
  for (const auto& r : net.reactions()) out.emplace(r.source, r.target);
  return out;
}

// 1-based labels as printed.
EdgeSet edges(std::initializer_list<Edge> one_based) {
  EdgeSet out;
  for (const auto& [s, t] : one_based) out.emplace(s - 1, t - 1);
  return out;
}

std::string describe(const EdgeSet& e) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [s, t] : e) {
    os << (first ? "" : ", ") << "C" << s + 1 << "->C" << t + 1;
    first = false;
  }
  os << "}";
  return os.str();
}

struct Solved {
  bool ok = false;
  RealizationProblem problem;
  DecodedRealization decoded;
  AuditReport audit;
  double seconds = 0.0;
};

Solved solve(const std::string& label, const Realization& r, const ProblemSettings& s) {
  Solved out;
  out.problem = make_problem(r, s);
  const auto start = std::chrono::steady_clock::now();
  const RealizeOutcome o = realize(out.problem);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.status != milp::SolveStatus::optimal || !o.decoded) return out;
  out.ok = true;
  out.decoded = *o.decoded;
  const RealizationResult& res = out.decoded.result;
  out.audit = audit_solution(out.problem, res, {kFeasibilityTol, kConjugacySamples, kSampleSeed});

  SolveRecord rec;
  rec.label = label;
  const KineticsMatrix a_prime = apply_transform(res.A_b, res.c, out.problem.Y);
  const ConjugacyReport c = check_conjugacy(out.problem.Y, build_Ak(r.network), a_prime, res.c,
                                            kConjugacySamples, kSampleSeed, {kConjugacyTol, kFeasibilityTol});
  rec.residual = c.max_relative_residual;
  rec.identity = s.conjugacy == Conjugacy::identity;
  if (rec.identity) rec.bitwise = a_prime.matrix() == res.A_b.matrix();
  g_solves.push_back(rec);
  return out;
}

ProblemSettings settings(Objective objective, Conjugacy conjugacy, double epsilon, double u) {
  ProblemSettings s;
  s.objective = objective;
  s.weakly_reversible = true;
  s.conjugacy = conjugacy;
  s.epsilon = epsilon;
  s.u = u;
  return s;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Verdict criterion1() {
  Verdict v;
  const Solved s = solve("example 1 dense", example1(), settings(Objective::dense, Conjugacy::scaling, 2.0 / 3.0, 20.0));
  v.require(s.ok, "no optimal solution");
  if (!s.ok) return v;
  const EdgeSet want = edges({{3, 1}, {5, 1}, {1, 5}, {3, 5}, {6, 3}, {1, 6}, {3, 6}, {5, 6}});
  const EdgeSet got = edges_of(s.decoded.network);
  v.require(got == want, "edges " + describe(got));
  v.require(is_weakly_reversible(s.decoded.network).weakly_reversible, "not weakly reversible");
  v.require(s.decoded.result.c == Vector::Ones(2), "c != (1, 1)");
  v.require(s.audit.passed, "audit failed");
  v.require(s.seconds <= 60.0, "slower than 60 s");
  return v;
}

Verdict criterion2() {
  Verdict v;
  const Solved s = solve("example 1 sparse", example1(), settings(Objective::sparse, Conjugacy::scaling, 0.1, 20.0));
  v.require(s.ok, "no optimal solution");
  if (!s.ok) return v;
  const EdgeSet got = edges_of(s.decoded.network);
  v.require(got == edges({{1, 6}, {6, 3}, {3, 5}, {5, 1}}), "edges " + describe(got));
  v.require(s.decoded.result.c != Vector::Ones(2), "identity scaling");
  v.require(s.audit.passed, "audit failed");
  v.require(s.seconds <= 60.0, "slower than 60 s");
  return v;
}

Verdict criterion3() {
  Verdict v;
  const Realization r = example_with_list("example2.ode", "example2.complexes");
  v.require(r.network.complex_count() == 19, "complex count");
  const EdgeSet want = edges({{1, 8}, {2, 9}, {8, 2}, {9, 2}, {9, 17}, {17, 1}});
  for (Objective objective : {Objective::sparse, Objective::dense}) {
    const std::string name = objective == Objective::sparse ? "sparse" : "dense";
    const Solved s = solve("example 2 " + name, r, settings(objective, Conjugacy::scaling, 0.1, 10.0));
    v.require(s.ok, name + ": no optimal solution");
    if (!s.ok) continue;
    const EdgeSet got = edges_of(s.decoded.network);
    v.require(got == want, name + ": edges " + describe(got));
    const Vector& c = s.decoded.result.c;
    v.require((c.array() == c(0)).all(), name + ": scaling not uniform");
    v.require(is_weakly_reversible(s.decoded.network).weakly_reversible, name + ": not weakly reversible");
    v.require(s.audit.passed, name + ": audit failed");
    v.require(s.seconds <= 600.0, name + ": slower than 10 min");
  }
  return v;
}

Verdict criterion4() {
  Verdict v;
  const Realization r = example_with_list("example3.ode", "example3.complexes");
  v.require(r.network.complex_count() == 10, "complex count");
  const Solved sparse = solve("example 3 sparse", r, settings(Objective::sparse, Conjugacy::scaling, 1.0 / 20.0, 20.0));
  const Solved dense = solve("example 3 dense", r, settings(Objective::dense, Conjugacy::scaling, 1.0 / 20.0, 20.0));
  v.require(sparse.ok && dense.ok, "no optimal solution");
  if (!sparse.ok || !dense.ok) return v;
  v.require(is_weakly_reversible(sparse.decoded.network).weakly_reversible, "sparse not weakly reversible");
  v.require(deficiency(sparse.decoded.network) == 0, "sparse deficiency nonzero");
  const Vector& c = sparse.decoded.result.c;
  const Eigen::Vector3d ratio(20.0, 2.0, 5.0);
  v.require(((c / c(0)) - ratio / ratio(0)).cwiseAbs().maxCoeff() <= 1e-9, "c not proportional to (20, 2, 5)");
  v.require(is_weakly_reversible(dense.decoded.network).weakly_reversible, "dense not weakly reversible");
  v.require(dense.decoded.network.reactions().size() > sparse.decoded.network.reactions().size(),
            "dense has no more reactions than sparse");
  for (const Solved* s : {&sparse, &dense}) {
    const RealizationResult& res = s->decoded.result;
    const ConjugacyReport report =
        check_conjugacy(s->problem.Y, build_Ak(r.network), apply_transform(res.A_b, res.c, s->problem.Y), res.c,
                        kConjugacySamples, kSampleSeed, {kConjugacyTol, kFeasibilityTol});
    v.require(report.passed, "check_conjugacy failed");
  }
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const CrosscheckReport r = wr_kernel_crosscheck(2024, 200, 6);
  v.require(r.agreements == 200, std::to_string(r.agreements) + "/200 agree");
  v.require(elapsed(start) <= 10.0, "slower than 10 s");
  return v;
}

// Exhaustive oracle over raw 0/1 vectors, independent of the LP solver.
std::pair<bool, double> enumerate_pure_binary(const milp::MilpModel& model) {
  const std::size_t k = model.variable_count();
  bool any = false;
  double best = milp::kInfinity;
  std::vector<double> x(k);
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    for (std::size_t i = 0; i < k; ++i) x[i] = (mask >> i) & 1u ? 1.0 : 0.0;
    if (!milp::check_solution(model, x, 0.0).feasible) continue;
    any = true;
    best = std::min(best, model.evaluate_objective(x));
  }
  return {any, best};
}

Verdict criterion6() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> binaries(2, 10), rows(1, 6), coeff(-5, 5), relation(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    milp::MilpModel model;
    std::vector<milp::VarId> x;
    const int k = binaries(rng);
    for (int i = 0; i < k; ++i) x.push_back(model.add_binary("x" + std::to_string(i)));
    for (int r = rows(rng); r > 0; --r) {
      std::vector<milp::LinearTerm> terms;
      double total = 0.0;
      for (milp::VarId id : x) {
        if (const int a = coeff(rng); a != 0) {
          terms.push_back({id, static_cast<double>(a)});
          total += std::abs(a);
        }
      }
      if (terms.empty()) continue;
      std::uniform_real_distribution<double> rhs(-0.2 * total, 0.6 * total);
      const int rel = relation(rng);
      model.add_constraint(std::move(terms),
                           rel == 0 ? milp::Relation::equal
                                    : (rel <= 2 ? milp::Relation::less_equal : milp::Relation::greater_equal),
                           std::round(rhs(rng)));
    }
    std::vector<milp::LinearTerm> objective;
    for (milp::VarId id : x) objective.push_back({id, static_cast<double>(coeff(rng))});
    model.set_objective(std::move(objective));

    const auto [any, best] = enumerate_pure_binary(model);
    const milp::Solution s = milp::solve_milp(model);
    const std::string at = "trial " + std::to_string(trial);
    if (!any) {
      v.require(s.status == milp::SolveStatus::infeasible, at + ": infeasibility missed");
      continue;
    }
    v.require(s.status == milp::SolveStatus::optimal, at + ": not optimal");
    if (s.status != milp::SolveStatus::optimal) continue;
    v.require(std::abs(s.objective_value - best) <= 1e-9, at + ": objective mismatch");
    v.require(milp::check_solution(model, s.values, kFeasibilityTol).feasible, at + ": substitution check");
  }
  v.require(elapsed(start) <= 30.0, "slower than 30 s");
  return v;
}

// Random networks over 2 or 3 species with m <= 6 complexes; M is taken from
// the network itself so the identity problem is feasible.
Realization random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> species(2, 3), complexes(3, 6), coeff(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0), rate(1.0, 5.0);
  for (;;) {
    const auto n = static_cast<std::size_t>(species(rng));
    const auto m = static_cast<std::size_t>(complexes(rng));
    std::set<std::vector<int>> seen;
    std::vector<Complex> cs;
    while (cs.size() < m) {
      std::vector<int> c(n);
      for (auto& e : c) e = coeff(rng);
      if (seen.insert(c).second) cs.push_back(Complex{c});
    }
    Network net(default_species_names(n));
    for (const auto& c : cs) net.add_complex(c);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        if (i != j && unit(rng) < 0.35) net.add_reaction(j, i, std::round(rate(rng) * 4.0) / 4.0);
      }
    }
    if (!net.reactions().empty()) return with_matrices(net);
  }
}

Verdict criterion8() {
  Verdict v;
  auto check = [&](const std::string& label, const Realization& r, ProblemSettings s) {
    s.conjugacy = Conjugacy::identity;
    s.objective = Objective::sparse;
    const Solved sparse = solve(label + " sparse", r, s);
    s.objective = Objective::dense;
    const Solved dense = solve(label + " dense", r, s);
    v.require(sparse.ok && dense.ok, label + ": no optimal solution");
    if (!sparse.ok || !dense.ok) return;
    const EdgeSet small = edges_of(sparse.decoded.network), large = edges_of(dense.decoded.network);
    for (const Edge& e : small) v.require(large.count(e) == 1, label + ": sparse edge outside dense");
  };
  check("example 1", example1(), settings(Objective::sparse, Conjugacy::identity, 2.0 / 3.0, 20.0));
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    ProblemSettings s;
    s.epsilon = 0.05;
    check("random " + std::to_string(k), random_instance(rng), s);
  }
  return v;
}

Verdict criterion7() {
  Verdict v;
  std::size_t identity = 0;
  for (const auto& rec : g_solves) {
    v.require(rec.residual <= kConjugacyTol, rec.label + ": residual " + std::to_string(rec.residual));
    if (rec.identity) {
      ++identity;
      v.require(rec.bitwise, rec.label + ": A_k' differs from A_b");
    }
  }
  v.require(!g_solves.empty() && identity > 0, "no solves recorded");
  if (v.passed) v.detail = std::to_string(g_solves.size()) + " solves, " + std::to_string(identity) + " identity";
  return v;
}

Verdict criterion9() {
  Verdict v;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> species(1, 4), terms(0, 5), degree(0, 4);
  std::uniform_real_distribution<double> magnitude(0.1, 10.0), point(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    PolySystem sys;
    sys.n = static_cast<std::size_t>(species(rng));
    sys.equations.resize(sys.n);
    for (std::size_t i = 0; i < sys.n; ++i) {
      for (int t = terms(rng); t > 0; --t) {
        std::vector<int> e(sys.n, 0);
        for (int unit = degree(rng); unit > 0; --unit) ++e[rng() % sys.n];
        double c = magnitude(rng);
        if (e[i] >= 1 && rng() % 2) c = -c;
        sys.equations[i].push_back({c, e});
      }
    }
    const PolySystem raw = sys;
    const Realization r = canonical_realization(sys);
    const KineticsMatrix ak = build_Ak(r.network);
    for (int k = 0; k < 20; ++k) {
      Vector x(static_cast<Eigen::Index>(sys.n));
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = point(rng);
      Vector oracle = Vector::Zero(x.size());
      for (std::size_t i = 0; i < raw.n; ++i) {
        for (const auto& mono : raw.equations[i]) {
          double value = mono.coeff;
          for (std::size_t j = 0; j < raw.n; ++j) value *= std::pow(x(static_cast<Eigen::Index>(j)), mono.exponents[j]);
          oracle(static_cast<Eigen::Index>(i)) += value;
        }
      }
      const Vector got = r.network.complex_count() == 0 ? Vector::Zero(x.size()) : rhs(r.Y, ak, x);
      const double err = (got - oracle).cwiseAbs().maxCoeff() / (1.0 + oracle.cwiseAbs().maxCoeff());
      v.require(err <= kCanonicalTol, "trial " + std::to_string(trial) + ": relative error " + std::to_string(err));
    }
  }
  return v;
}

}  // namespace
}  // namespace kinreal

int main() {
  using namespace kinreal;
  // Criterion 7 reads the solves recorded by 1-4 and 8, so it runs last.
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {8, criterion8}, {9, criterion9}, {7, criterion7}};
  std::vector<std::string> lines(10);
  bool all = true;
  for (const auto& [id, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.passed = false;
      v.detail = std::string("exception: ") + e.what();
    }
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, " (%.2f s)", elapsed(start));
    lines[static_cast<std::size_t>(id)] = std::string(v.passed ? "PASS" : "FAIL") + " criterion " +
                                          std::to_string(id) + buffer + (v.detail.empty() ? "" : ": " + v.detail);
    all = all && v.passed;
  }
  for (int id = 1; id <= 9; ++id) std::puts(lines[static_cast<std::size_t>(id)].c_str());
  return all ? 0 : 1;
}
