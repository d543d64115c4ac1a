#pragma once

// Polynomial ODE systems and their canonical mass-action realization: every
// monomial beta * x^a in the equation for x_i becomes the reaction
// a -> a + sign(beta) e_i with rate |beta|.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kinreal/network.hpp"

namespace kinreal {

struct Monomial {
  double coeff = 0.0;
  std::vector<int> exponents;
};

/// Graded lexicographic order: lower total degree first; equal degrees
/// compare exponent vectors lexicographically, larger first (x1 before x2).
inline bool grlex_less(const std::vector<int>& a, const std::vector<int>& b) {
  int da = 0, db = 0;
  for (int e : a) da += e;
  for (int e : b) db += e;
  if (da != db) return da < db;
  return a > b;
}

struct PolySystem {
  std::size_t n = 0;
  /// equations[i] holds the monomials of dx_{i+1}/dt, merged and grlex-sorted.
  std::vector<std::vector<Monomial>> equations;
};

/// Raised when a negative term does not contain its own species, which no
/// mass-action network can produce.
class KineticAdmissibilityError : public std::invalid_argument {
 public:
  KineticAdmissibilityError(std::size_t equation, Monomial monomial, const std::string& message)
      : std::invalid_argument(message), equation_(equation), monomial_(std::move(monomial)) {}

  std::size_t equation() const { return equation_; }
  const Monomial& monomial() const { return monomial_; }

 private:
  std::size_t equation_;
  Monomial monomial_;
};

inline std::string format_monomial(const Monomial& m) {
  std::string out = detail::format_real(m.coeff, 12);
  for (std::size_t j = 0; j < m.exponents.size(); ++j) {
    if (m.exponents[j] == 0) continue;
    out += "*x" + std::to_string(j + 1);
    if (m.exponents[j] != 1) out += "^" + std::to_string(m.exponents[j]);
  }
  return out;
}

/// Merges equal exponent vectors, drops zero coefficients, sorts, and checks
/// kinetic admissibility.
inline PolySystem normalize(PolySystem sys) {
  if (sys.equations.size() > sys.n) throw std::invalid_argument("more equations than species");
  sys.equations.resize(sys.n);
  for (std::size_t i = 0; i < sys.n; ++i) {
    std::map<std::vector<int>, double> merged;
    for (auto& m : sys.equations[i]) {
      if (m.exponents.size() > sys.n) throw std::invalid_argument("monomial exceeds species count");
      m.exponents.resize(sys.n, 0);
      for (int e : m.exponents) {
        if (e < 0) throw std::invalid_argument("negative exponent");
      }
      if (!std::isfinite(m.coeff)) throw std::invalid_argument("non-finite coefficient");
      merged[m.exponents] += m.coeff;
    }
    std::vector<Monomial> out;
    for (auto& [exps, coeff] : merged) {
      if (coeff != 0.0) out.push_back({coeff, exps});
    }
    std::sort(out.begin(), out.end(),
              [](const Monomial& a, const Monomial& b) { return grlex_less(a.exponents, b.exponents); });
    for (const auto& m : out) {
      if (m.coeff < 0.0 && m.exponents[i] < 1) {
        throw KineticAdmissibilityError(
            i, m,
            "kinetically inadmissible term " + format_monomial(m) + " in the equation for x" +
                std::to_string(i + 1) + " (negative term without x" + std::to_string(i + 1) + ")");
      }
    }
    sys.equations[i] = std::move(out);
  }
  return sys;
}

/// Parses lines of the form `x<i>' = <signed monomial list>`, where a
/// monomial is `[coeff] [*] x<j>[^p] ...` and factors are joined by `*` or
/// whitespace. Equations that never appear are zero.
inline PolySystem parse_polysystem(std::string_view text) {
  struct RawMonomial {
    double coeff;
    std::map<std::size_t, int> powers;
  };
  std::map<std::size_t, std::vector<RawMonomial>> raw;
  std::size_t n = 0;
  auto lines = detail::split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    detail::LineCursor cursor(detail::strip_comment(lines[ln]), ln + 1);
    if (cursor.at_end()) continue;
    auto variable_index = [&]() -> std::size_t {
      if (!cursor.consume("x")) cursor.fail("expected a variable x<i>");
      auto index = cursor.integer();
      if (!index || *index < 1) cursor.fail("variable index must be a positive integer");
      return static_cast<std::size_t>(*index);
    };
    const std::size_t lhs = variable_index();
    n = std::max(n, lhs);
    cursor.expect("'");
    cursor.expect("=");
    if (raw.count(lhs) != 0) cursor.fail("equation for x" + std::to_string(lhs) + " given twice");
    auto& terms = raw[lhs];
    bool first = true;
    while (true) {
      double sign = 1.0;
      if (cursor.consume("-")) {
        sign = -1.0;
      } else if (cursor.consume("+")) {
      } else if (!first) {
        if (cursor.at_end()) break;
        cursor.fail("expected '+' or '-' between terms");
      }
      first = false;
      RawMonomial term{sign, {}};
      bool has_part = false;
      const char next = cursor.peek();
      if (std::isdigit(static_cast<unsigned char>(next)) || next == '.') {
        auto value = cursor.real();
        if (!value) cursor.fail("malformed coefficient");
        term.coeff *= *value;
        has_part = true;
      }
      while (true) {
        const bool star = cursor.consume("*");
        if (cursor.peek() != 'x') {
          if (star) cursor.fail("expected a variable after '*'");
          break;
        }
        const std::size_t var = variable_index();
        n = std::max(n, var);
        int power = 1;
        if (cursor.consume("^")) {
          const std::size_t exp_column = cursor.column();
          auto p = cursor.integer();
          const char after = cursor.peek();
          if (!p || after == '.' || after == 'e' || after == 'E') {
            throw ParseError("exponent must be a nonnegative integer", ln + 1, exp_column);
          }
          if (*p > 1000) cursor.fail("exponent too large");
          power = static_cast<int>(*p);
        }
        term.powers[var] += power;
        has_part = true;
      }
      if (!has_part) cursor.fail("expected a term");
      terms.push_back(std::move(term));
      if (cursor.at_end()) break;
    }
  }
  PolySystem sys;
  sys.n = n;
  sys.equations.resize(n);
  for (auto& [lhs, terms] : raw) {
    for (auto& t : terms) {
      Monomial m{t.coeff, std::vector<int>(n, 0)};
      for (auto [var, power] : t.powers) m.exponents[var - 1] += power;
      sys.equations[lhs - 1].push_back(std::move(m));
    }
  }
  return normalize(std::move(sys));
}

inline Vector evaluate(const PolySystem& sys, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != sys.n) throw std::invalid_argument("dimension mismatch");
  Vector out = Vector::Zero(x.size());
  for (std::size_t i = 0; i < sys.n; ++i) {
    for (const auto& m : sys.equations[i]) {
      double term = m.coeff;
      for (std::size_t j = 0; j < sys.n; ++j) {
        if (m.exponents[j] != 0) term *= std::pow(x(static_cast<Eigen::Index>(j)), m.exponents[j]);
      }
      out(static_cast<Eigen::Index>(i)) += term;
    }
  }
  return out;
}

inline std::vector<std::string> default_species_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));
  return names;
}

/// A network together with its stoichiometric matrix and M = Y * A_k.
struct Realization {
  Network network;
  StoichMatrix Y;
  Matrix M;
};

inline Realization with_matrices(Network net) {
  StoichMatrix y = build_Y(net);
  Matrix m = y.cast<double>() * build_Ak(net).matrix();
  return {std::move(net), std::move(y), std::move(m)};
}

/// Complex order: sources in grlex order, then products in order of first
/// appearance. Reactions are sorted by (source, target).
inline Realization canonical_realization(const PolySystem& input) {
  const PolySystem sys = normalize(input);
  Network net(default_species_names(sys.n));
  std::vector<std::vector<int>> sources;
  for (const auto& eq : sys.equations) {
    for (const auto& m : eq) sources.push_back(m.exponents);
  }
  std::sort(sources.begin(), sources.end(), grlex_less);
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  for (const auto& s : sources) net.add_complex(Complex{s});

  std::map<std::pair<std::size_t, std::size_t>, double> rates;
  for (const auto& s : sources) {
    const std::size_t src = *net.find_complex(Complex{s});
    for (std::size_t i = 0; i < sys.n; ++i) {
      for (const auto& m : sys.equations[i]) {
        if (m.exponents != s) continue;
        Complex product{s};
        product.coeffs[i] += m.coeff > 0.0 ? 1 : -1;
        const std::size_t dst = net.add_complex(std::move(product));
        rates[{src, dst}] += std::abs(m.coeff);
      }
    }
  }
  for (auto [edge, rate] : rates) net.add_reaction(edge.first, edge.second, rate);
  return with_matrices(std::move(net));
}

/// Appends complexes from `extra` that the network lacks; M gains zero
/// columns for them. Repeats inside `extra` are an error.
inline Realization complexes_union(const Network& base, const std::vector<Complex>& extra) {
  for (std::size_t a = 0; a < extra.size(); ++a) {
    for (std::size_t b = a + 1; b < extra.size(); ++b) {
      if (extra[a] == extra[b]) throw std::invalid_argument("duplicate complex in the extra list");
    }
  }
  Network net = base;
  for (const auto& c : extra) net.add_complex(c);
  return with_matrices(std::move(net));
}

/// The same network with complexes listed in `order` first (each must be
/// present), followed by the remaining complexes in their current order.
inline Network reorder_complexes(const Network& net, const std::vector<Complex>& order) {
  std::vector<std::size_t> perm;
  std::vector<bool> placed(net.complex_count(), false);
  for (const auto& c : order) {
    auto index = net.find_complex(c);
    if (!index) throw std::invalid_argument("complex not present in the network");
    if (placed[*index]) throw std::invalid_argument("complex listed twice");
    placed[*index] = true;
    perm.push_back(*index);
  }
  for (std::size_t j = 0; j < net.complex_count(); ++j) {
    if (!placed[j]) perm.push_back(j);
  }
  std::vector<std::size_t> new_index(net.complex_count());
  Network out(net.species());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    new_index[perm[k]] = k;
    out.append_new_complex(net.complexes()[perm[k]]);
  }
  for (const auto& r : net.reactions()) {
    out.add_reaction(new_index[r.source], new_index[r.target], r.rate);
  }
  return out;
}

}  // namespace kinreal
