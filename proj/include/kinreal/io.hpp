#pragma once

// JSON forms of networks, polynomial systems, problem configs, candidate
// solutions and reports. Network JSON uses 1-based complex indices:
//   {"species": [...], "complexes": [[int, ...], ...],
//    "reactions": [{"src": i, "dst": j, "k": r}, ...]}
// A solution file is a network JSON of the conjugate network A_k' plus the
// conjugacy constants: {..., "c": [c_1, ..., c_n]}.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kinreal/canonical.hpp"
#include "kinreal/conjugacy.hpp"
#include "kinreal/encoder.hpp"
#include "kinreal/network.hpp"
#include "kinreal/realize.hpp"
#include "kinreal/verify.hpp"

namespace kinreal {

using Json = nlohmann::ordered_json;

/// Malformed JSON document or field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

namespace detail {

template <typename T>
T json_get(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string(where) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

inline std::size_t one_based(const Json& j, const char* key, std::size_t count) {
  const auto v = json_get<std::int64_t>(j, key, "reaction");
  if (v < 1 || static_cast<std::size_t>(v) > count) {
    throw FormatError(std::string("reaction: '") + key + "' index " + std::to_string(v) + " out of range");
  }
  return static_cast<std::size_t>(v - 1);
}

}  // namespace detail

inline Json network_to_json(const Network& net) {
  Json j;
  j["species"] = net.species();
  Json complexes = Json::array();
  for (const auto& c : net.complexes()) complexes.push_back(c.coeffs);
  j["complexes"] = std::move(complexes);
  Json reactions = Json::array();
  for (const auto& r : net.reactions()) {
    reactions.push_back({{"src", r.source + 1}, {"dst", r.target + 1}, {"k", r.rate}});
  }
  j["reactions"] = std::move(reactions);
  return j;
}

inline Network network_from_json(const Json& j) {
  Network net(detail::json_get<std::vector<std::string>>(j, "species", "network"));
  try {
    for (const auto& c : detail::json_get<std::vector<std::vector<int>>>(j, "complexes", "network")) {
      net.append_new_complex(Complex{c});
    }
    const Json reactions = detail::json_get<Json>(j, "reactions", "network");
    if (!reactions.is_array()) throw FormatError("network: 'reactions' must be an array");
    for (const auto& r : reactions) {
      const std::size_t src = detail::one_based(r, "src", net.complex_count());
      const std::size_t dst = detail::one_based(r, "dst", net.complex_count());
      net.add_reaction(src, dst, detail::json_get<double>(r, "k", "reaction"));
    }
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("network: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(std::string("network: ") + e.what());
  }
  return net;
}

inline Json polysystem_to_json(const PolySystem& sys) {
  Json equations = Json::array();
  for (const auto& eq : sys.equations) {
    Json terms = Json::array();
    for (const auto& m : eq) terms.push_back({{"coeff", m.coeff}, {"exponents", m.exponents}});
    equations.push_back(std::move(terms));
  }
  return {{"n", sys.n}, {"equations", std::move(equations)}};
}

inline PolySystem polysystem_from_json(const Json& j) {
  PolySystem sys;
  sys.n = detail::json_get<std::size_t>(j, "n", "polynomial system");
  const Json equations = detail::json_get<Json>(j, "equations", "polynomial system");
  if (!equations.is_array() || equations.size() != sys.n) {
    throw FormatError("polynomial system: 'equations' must hold n entries");
  }
  for (const auto& eq : equations) {
    std::vector<Monomial> terms;
    for (const auto& t : eq) {
      Monomial m{detail::json_get<double>(t, "coeff", "monomial"),
                 detail::json_get<std::vector<int>>(t, "exponents", "monomial")};
      if (m.exponents.size() != sys.n) throw FormatError("monomial: exponent vector must have n entries");
      for (int e : m.exponents) {
        if (e < 0) throw FormatError("monomial: negative exponent");
      }
      terms.push_back(std::move(m));
    }
    sys.equations.push_back(std::move(terms));
  }
  return normalize(std::move(sys));
}

/// One complex formula per line over a fixed species list; '#' comments and
/// blank lines are skipped.
inline std::vector<Complex> parse_complex_list(std::string_view text,
                                               const std::vector<std::string>& species) {
  std::vector<Complex> out;
  const auto lines = detail::split_lines(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string_view line = detail::strip_comment(lines[k]);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(parse_complex_formula(line, species, k + 1));
  }
  return out;
}

/// Applies the keys present in a config JSON on top of `base`. "u" is a
/// scalar or an m x m array of rows (diagonal ignored).
inline ProblemSettings settings_from_json(const Json& j, ProblemSettings base = {}) {
  if (!j.is_object()) throw FormatError("config: expected an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "objective") {
        const auto v = value.get<std::string>();
        if (v != "sparse" && v != "dense") throw FormatError("config: objective must be sparse or dense");
        base.objective = v == "sparse" ? Objective::sparse : Objective::dense;
      } else if (key == "weakly_reversible") {
        if (!value.is_boolean()) throw FormatError("config: weakly_reversible must be a boolean");
        base.weakly_reversible = value.get<bool>();
      } else if (key == "conjugacy") {
        const auto v = value.get<std::string>();
        if (v != "identity" && v != "scaling") throw FormatError("config: conjugacy must be identity or scaling");
        base.conjugacy = v == "identity" ? Conjugacy::identity : Conjugacy::scaling;
      } else if (key == "epsilon") {
        base.epsilon = detail::json_get<double>(j, "epsilon", "config");
      } else if (key == "epsilon_c") {
        base.epsilon_c = detail::json_get<double>(j, "epsilon_c", "config");
      } else if (key == "u") {
        if (value.is_number()) {
          base.u = value.get<double>();
          base.u_matrix.reset();
        } else {
          const auto rows = detail::json_get<std::vector<std::vector<double>>>(j, "u", "config");
          Matrix u(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
          for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw FormatError("config: u must be a square matrix");
            for (std::size_t k = 0; k < rows.size(); ++k) u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
          }
          u.diagonal().setZero();
          base.u_matrix = std::move(u);
        }
      } else {
        throw FormatError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return base;
}

/// A decimal number or an exact ratio "p/q" of two decimals; nullopt when the
/// text is neither.
inline std::optional<double> parse_real(std::string_view text) {
  auto number = [](std::string_view t) -> std::optional<double> {
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) return std::nullopt;
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto p = number(text.substr(0, slash)), q = number(text.substr(slash + 1));
    if (!p || !q || *q == 0.0) return std::nullopt;
    return *p / *q;
  }
  return number(text);
}

/// Whitespace-separated m x m matrix, one row per line; '#' comments allowed.
inline Matrix parse_matrix_text(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for (std::string_view line : detail::split_lines(text)) {
    line = detail::strip_comment(line);
    std::istringstream in{std::string(line)};
    std::vector<double> row;
    std::string token;
    while (in >> token) {
      const auto v = parse_real(token);
      if (!v) throw FormatError("matrix: '" + token + "' is not a number");
      row.push_back(*v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw FormatError("matrix: expected a square matrix");
    for (std::size_t k = 0; k < rows.size(); ++k) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return out;
}

inline Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

struct CandidateSolution {
  /// The conjugate network N' with kinetics A_k'.
  Network network;
  Vector c;
};

inline Json solution_to_json(const Network& conjugate, const Vector& c) {
  Json j = network_to_json(conjugate);
  j["c"] = vector_to_json(c);
  return j;
}

inline CandidateSolution solution_from_json(const Json& j) {
  CandidateSolution s{network_from_json(j), {}};
  const auto c = detail::json_get<std::vector<double>>(j, "c", "solution");
  if (c.size() != s.network.species_count()) {
    throw FormatError("solution: 'c' must have one entry per species");
  }
  s.c = Vector(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) s.c(static_cast<Eigen::Index>(i)) = c[i];
  return s;
}

/// Kinetics matrix of `net` laid out over `complexes` (same species order).
/// Every complex of a reaction must appear in the list.
inline KineticsMatrix kinetics_over(const Network& net, const std::vector<Complex>& complexes) {
  KineticsMatrix ak(complexes.size());
  auto locate = [&](std::size_t k) {
    const Complex& c = net.complexes()[k];
    for (std::size_t j = 0; j < complexes.size(); ++j) {
      if (complexes[j] == c) return j;
    }
    throw FormatError("complex " + format_complex(c, net.species()) + " is not in the problem's complex list");
  };
  for (const auto& r : net.reactions()) ak.set_rate(locate(r.source), locate(r.target), r.rate);
  return ak;
}

/// Reads a given system: a polynomial ODE file (".ode"), a network or
/// polynomial-system JSON (".json"), or a reaction file (anything else).
/// ODE inputs go through the canonical realization.
inline Realization load_realization(const std::string& path) {
  const std::string text = read_file(path);
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".ode")) return canonical_realization(parse_polysystem(text));
  if (ends_with(".json")) {
    const Json j = parse_json(text);
    if (j.is_object() && j.contains("equations")) return canonical_realization(polysystem_from_json(j));
    return with_matrices(network_from_json(j));
  }
  return with_matrices(parse_network(text));
}

/// Adds the listed complexes to the realization and moves them to the front
/// in list order, so C_k refers to the k-th listed complex.
inline Realization apply_complex_list(const Realization& r, const std::vector<Complex>& order) {
  const Realization joined = complexes_union(r.network, order);
  return with_matrices(reorder_complexes(joined.network, order));
}

inline Json conjugacy_report_to_json(const ConjugacyReport& r) {
  Json j{{"passed", r.passed},
         {"seed", r.seed},
         {"samples", r.samples},
         {"max_relative_residual", r.max_relative_residual},
         {"algebraic_residual", r.algebraic_residual},
         {"algebraic_passed", r.algebraic_passed}};
  if (r.first_failure) {
    j["first_failure"] = vector_to_json(*r.first_failure);
    j["first_failure_residual"] = r.first_failure_residual;
  }
  return j;
}

inline Json audit_to_json(const AuditReport& a) {
  Json checks = Json::array();
  for (const auto& c : a.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"max_residual", c.max_residual},
                      {"failures", c.failures}});
  }
  Json j{{"passed", a.passed}, {"checks", std::move(checks)}};
  if (a.conjugacy) j["conjugacy"] = conjugacy_report_to_json(*a.conjugacy);
  return j;
}

inline Json trajectory_to_json(const TrajectoryReport& t) {
  Json j{{"verdict", to_string(t.verdict)}, {"max_error", t.max_error}, {"step", t.step}};
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

inline Json stages_to_json(const std::vector<StageReport>& stages) {
  Json out = Json::array();
  for (const auto& s : stages) {
    out.push_back({{"name", s.name},
                   {"status", milp::to_string(s.status)},
                   {"objective", s.objective},
                   {"nodes", s.nodes},
                   {"lp_iterations", s.lp_iterations}});
  }
  return out;
}

inline Json problem_to_json(const RealizationProblem& p) {
  return {{"objective", to_string(p.objective)},
          {"weakly_reversible", p.weakly_reversible},
          {"conjugacy", to_string(p.conjugacy)},
          {"epsilon", p.epsilon},
          {"epsilon_c", p.epsilon_c},
          {"complexes", p.complex_count()},
          {"species", p.species_count()}};
}

}  // namespace kinreal
