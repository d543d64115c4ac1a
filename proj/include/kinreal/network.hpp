#pragma once

// Reaction networks under mass-action kinetics: species, complexes, the
// reaction graph, and the matrices Y (stoichiometry), A_k (kinetics) and
// the mass-action monomial vector.

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace kinreal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using StoichMatrix = Eigen::MatrixXi;

/// Raised on malformed input text. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A complex is identified by its exact stoichiometric coefficient vector.
struct Complex {
  std::vector<int> coeffs;

  std::size_t species_count() const { return coeffs.size(); }
  bool is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](int c) { return c == 0; });
  }
  int degree() const {
    int total = 0;
    for (int c : coeffs) total += c;
    return total;
  }

  friend bool operator==(const Complex&, const Complex&) = default;
  friend auto operator<=>(const Complex&, const Complex&) = default;
};

/// Reaction source -> target with rate constant `rate`. Indices are 0-based
/// positions in Network::complexes().
struct Reaction {
  std::size_t source = 0;
  std::size_t target = 0;
  double rate = 0.0;

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// Kirchhoff matrix of a reaction graph. Entry (i, j) for i != j is the rate
/// of reaction C_j -> C_i; the diagonal is always the negated off-diagonal
/// column sum, so every column sums to zero exactly.
class KineticsMatrix {
 public:
  KineticsMatrix() = default;
  explicit KineticsMatrix(std::size_t size) : entries_(Matrix::Zero(size, size)) {}

  /// Builds from a square matrix whose diagonal is ignored. Throws on
  /// negative off-diagonal entries.
  static KineticsMatrix from_off_diagonal(const Matrix& off_diagonal) {
    if (off_diagonal.rows() != off_diagonal.cols()) {
      throw std::invalid_argument("kinetics matrix must be square");
    }
    KineticsMatrix result(static_cast<std::size_t>(off_diagonal.rows()));
    for (Eigen::Index j = 0; j < off_diagonal.cols(); ++j) {
      for (Eigen::Index i = 0; i < off_diagonal.rows(); ++i) {
        if (i == j) continue;
        if (off_diagonal(i, j) < 0.0) {
          throw std::invalid_argument("kinetics matrix has a negative off-diagonal entry");
        }
        result.entries_(i, j) = off_diagonal(i, j);
      }
    }
    result.rebuild_diagonal();
    return result;
  }

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }

  /// Rate of reaction `source` -> `target` (0 when absent).
  double rate(std::size_t source, std::size_t target) const {
    return entries_(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(source));
  }

  void set_rate(std::size_t source, std::size_t target, double value) {
    if (source == target) throw std::invalid_argument("self-loop reaction");
    if (value < 0.0) throw std::invalid_argument("negative rate constant");
    auto s = static_cast<Eigen::Index>(source);
    auto t = static_cast<Eigen::Index>(target);
    entries_(t, s) = value;
    double total = 0.0;
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      if (i != s) total += entries_(i, s);
    }
    entries_(s, s) = -total;
  }

  /// Number of nonzero off-diagonal entries.
  std::size_t reaction_count() const {
    std::size_t count = 0;
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        if (i != j && entries_(i, j) != 0.0) ++count;
      }
    }
    return count;
  }

  friend bool operator==(const KineticsMatrix& a, const KineticsMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
  }

 private:
  void rebuild_diagonal() {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        if (i != j) total += entries_(i, j);
      }
      entries_(j, j) = -total;
    }
  }

  Matrix entries_;
};

/// The triple (species, complexes, reactions). Complexes are pairwise
/// distinct, reactions never self-loops, at most one reaction per ordered
/// pair, and every rate is positive.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<std::string> species) : species_(std::move(species)) {
    for (std::size_t i = 0; i < species_.size(); ++i) {
      if (!species_index_.emplace(species_[i], i).second) {
        throw std::invalid_argument("duplicate species name '" + species_[i] + "'");
      }
    }
  }

  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Complex>& complexes() const { return complexes_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  std::size_t species_count() const { return species_.size(); }
  std::size_t complex_count() const { return complexes_.size(); }

  std::optional<std::size_t> find_species(std::string_view name) const {
    auto it = species_index_.find(std::string(name));
    if (it == species_index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t add_species(const std::string& name) {
    if (auto existing = find_species(name)) return *existing;
    species_.push_back(name);
    species_index_.emplace(name, species_.size() - 1);
    for (auto& complex : complexes_) complex.coeffs.push_back(0);
    return species_.size() - 1;
  }

  std::optional<std::size_t> find_complex(const Complex& complex) const {
    auto it = std::find(complexes_.begin(), complexes_.end(), complex);
    if (it == complexes_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - complexes_.begin());
  }

  /// Returns the index of `complex`, appending it when new.
  std::size_t add_complex(Complex complex) {
    check_complex(complex);
    if (auto existing = find_complex(complex)) return *existing;
    complexes_.push_back(std::move(complex));
    return complexes_.size() - 1;
  }

  /// Appends a complex that must not already be present.
  std::size_t append_new_complex(Complex complex) {
    check_complex(complex);
    if (find_complex(complex)) throw std::invalid_argument("duplicate complex");
    complexes_.push_back(std::move(complex));
    return complexes_.size() - 1;
  }

  void add_reaction(std::size_t source, std::size_t target, double rate) {
    if (source >= complexes_.size() || target >= complexes_.size()) {
      throw std::out_of_range("reaction references an unknown complex");
    }
    if (source == target) throw std::invalid_argument("reaction source equals its target");
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw std::invalid_argument("rate constant must be positive and finite");
    }
    if (find_reaction(source, target)) {
      throw std::invalid_argument("duplicate reaction between the same ordered complex pair");
    }
    reactions_.push_back({source, target, rate});
  }

  std::optional<std::size_t> find_reaction(std::size_t source, std::size_t target) const {
    for (std::size_t r = 0; r < reactions_.size(); ++r) {
      if (reactions_[r].source == source && reactions_[r].target == target) return r;
    }
    return std::nullopt;
  }

  friend bool operator==(const Network& a, const Network& b) {
    return a.species_ == b.species_ && a.complexes_ == b.complexes_ &&
           a.reactions_ == b.reactions_;
  }

 private:
  void check_complex(const Complex& complex) const {
    if (complex.coeffs.size() != species_.size()) {
      throw std::invalid_argument("complex dimension does not match the species count");
    }
    for (int c : complex.coeffs) {
      if (c < 0) throw std::invalid_argument("negative stoichiometric coefficient");
    }
  }

  std::vector<std::string> species_;
  std::map<std::string, std::size_t> species_index_;
  std::vector<Complex> complexes_;
  std::vector<Reaction> reactions_;
};

/// n x m matrix whose column j is complex j.
inline StoichMatrix build_Y(const Network& net) {
  StoichMatrix y = StoichMatrix::Zero(static_cast<Eigen::Index>(net.species_count()),
                                      static_cast<Eigen::Index>(net.complex_count()));
  for (std::size_t j = 0; j < net.complex_count(); ++j) {
    const auto& coeffs = net.complexes()[j].coeffs;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = coeffs[i];
    }
  }
  return y;
}

inline KineticsMatrix build_Ak(const Network& net) {
  Matrix off = Matrix::Zero(static_cast<Eigen::Index>(net.complex_count()),
                            static_cast<Eigen::Index>(net.complex_count()));
  for (const auto& r : net.reactions()) {
    off(static_cast<Eigen::Index>(r.target), static_cast<Eigen::Index>(r.source)) = r.rate;
  }
  return KineticsMatrix::from_off_diagonal(off);
}

/// Psi_j(x) = prod_i x_i^{Y_ij}. Requires x > 0.
inline Vector mass_action(const StoichMatrix& y, const Vector& x) {
  if (x.size() != y.rows()) throw std::invalid_argument("concentration dimension mismatch");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) > 0.0)) throw std::invalid_argument("concentrations must be positive");
  }
  Vector psi = Vector::Ones(y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    double value = 1.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      int power = y(i, j);
      if (power != 0) value *= std::pow(x(i), power);
    }
    psi(j) = value;
  }
  return psi;
}

/// Right-hand side Y * A_k * Psi(x) of the mass-action ODE.
inline Vector rhs(const StoichMatrix& y, const KineticsMatrix& ak, const Vector& x) {
  if (static_cast<std::size_t>(y.cols()) != ak.size()) {
    throw std::invalid_argument("Y and A_k dimensions disagree");
  }
  return y.cast<double>() * (ak.matrix() * mass_action(y, x));
}

/// Human-readable formula, "0" for the zero complex.
inline std::string format_complex(const Complex& complex,
                                  const std::vector<std::string>& species) {
  std::string out;
  for (std::size_t i = 0; i < complex.coeffs.size(); ++i) {
    int c = complex.coeffs[i];
    if (c == 0) continue;
    if (!out.empty()) out += " + ";
    if (c != 1) out += std::to_string(c) + " ";
    out += species[i];
  }
  return out.empty() ? "0" : out;
}

namespace detail {

/// Shortest text that reads back to the same double when `precision` is 0;
/// otherwise `precision` significant digits.
inline std::string format_real(double value, int precision = 0) {
  if (precision == 0) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
  }
  std::ostringstream os;
  os.precision(precision);
  os << value;
  return os.str();
}

// Cursor over one line of input, tracking 1-based columns.
class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool consume(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
  }
  std::optional<long long> integer() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) return std::nullopt;
    try {
      return std::stoll(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::out_of_range&) {
      pos_ = start;
      fail("integer out of range");
    }
  }
  std::optional<std::string> identifier() {
    skip_space();
    std::size_t start = pos_;
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return std::string(text_.substr(start, pos_ - start));
    }
    return std::nullopt;
  }
  std::optional<double> real() {
    skip_space();
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(rest, &used);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    pos_ += used;
    return value;
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, pos_ + 1);
  }
  std::size_t column() const { return pos_ + 1; }
  void set_position(std::size_t pos) { pos_ = pos; }
  std::size_t position() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

// Parses "0" or "[coeff] NAME + ...". Species are registered in `net` on first use.
inline Complex parse_complex(LineCursor& cursor, Network& net) {
  std::vector<std::pair<std::size_t, int>> terms;
  std::size_t save = cursor.position();
  if (auto zero = cursor.integer(); zero && *zero == 0) {
    cursor.skip_space();
    if (!cursor.identifier()) {
      return Complex{std::vector<int>(net.species_count(), 0)};
    }
    cursor.set_position(save);
    cursor.fail("coefficient must be positive");
  }
  cursor.set_position(save);
  while (true) {
    long long coeff = 1;
    if (auto number = cursor.integer()) {
      if (*number <= 0) cursor.fail("coefficient must be positive");
      if (*number > 1000000) cursor.fail("coefficient too large");
      coeff = *number;
    }
    auto name = cursor.identifier();
    if (!name) cursor.fail("expected a species name");
    std::size_t index = net.add_species(*name);
    terms.emplace_back(index, static_cast<int>(coeff));
    if (!cursor.consume("+")) break;
  }
  Complex complex{std::vector<int>(net.species_count(), 0)};
  for (auto [index, coeff] : terms) complex.coeffs[index] += coeff;
  return complex;
}

}  // namespace detail

/// Parses a reaction file. Each non-blank line is
/// `<complex> -> <complex> ; <rate>`; `#` begins a comment.
inline Network parse_network(std::string_view text) {
  struct PendingReaction {
    Complex source;
    Complex target;
    double rate;
    std::size_t line;
  };
  Network net;
  std::vector<PendingReaction> pending;
  auto lines = detail::split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view body = detail::strip_comment(lines[ln]);
    detail::LineCursor cursor(body, ln + 1);
    if (cursor.at_end()) continue;
    Complex source = detail::parse_complex(cursor, net);
    cursor.expect("->");
    Complex target = detail::parse_complex(cursor, net);
    cursor.expect(";");
    std::size_t rate_column = cursor.column();
    auto rate = cursor.real();
    if (!rate) cursor.fail("expected a rate constant");
    if (!(*rate > 0.0) || !std::isfinite(*rate)) {
      throw ParseError("rate constant must be positive", ln + 1, rate_column);
    }
    if (!cursor.at_end()) cursor.fail("unexpected trailing text");
    pending.push_back({std::move(source), std::move(target), *rate, ln + 1});
  }
  // Species may have been introduced after a complex was read; pad to full width.
  for (auto& p : pending) {
    p.source.coeffs.resize(net.species_count(), 0);
    p.target.coeffs.resize(net.species_count(), 0);
    std::size_t s = net.add_complex(p.source);
    std::size_t t = net.add_complex(p.target);
    if (s == t) throw ParseError("reaction source equals its target", p.line, 1);
    if (net.find_reaction(s, t)) {
      throw ParseError("duplicate reaction between the same ordered complex pair", p.line, 1);
    }
    net.add_reaction(s, t, p.rate);
  }
  return net;
}

/// Parses a single complex formula (e.g. "X1 + 2 X3") over a fixed species
/// list. Unknown species names are an error.
inline Complex parse_complex_formula(std::string_view text,
                                     const std::vector<std::string>& species,
                                     std::size_t line = 1) {
  Network scratch(species);
  detail::LineCursor cursor(text, line);
  Complex complex = detail::parse_complex(cursor, scratch);
  if (!cursor.at_end()) cursor.fail("unexpected trailing text");
  if (scratch.species_count() != species.size()) {
    throw ParseError("unknown species '" + scratch.species().back() + "'", line, 1);
  }
  return complex;
}

/// Renders a network in the reaction file format; parse_network inverts it
/// for networks whose complexes all take part in some reaction.
inline std::string render_network(const Network& net) {
  std::ostringstream os;
  for (const auto& r : net.reactions()) {
    os << format_complex(net.complexes()[r.source], net.species()) << " -> "
       << format_complex(net.complexes()[r.target], net.species()) << " ; "
       << detail::format_real(r.rate) << '\n';
  }
  return os.str();
}

/// Graphviz digraph with one node per complex touched by a reaction.
inline std::string to_dot(const Network& net) {
  std::vector<bool> used(net.complex_count(), false);
  for (const auto& r : net.reactions()) used[r.source] = used[r.target] = true;
  std::ostringstream os;
  os << "digraph reaction_graph {\n  rankdir=LR;\n";
  for (std::size_t j = 0; j < net.complex_count(); ++j) {
    if (!used[j]) continue;
    os << "  C" << j + 1 << " [label=\"" << format_complex(net.complexes()[j], net.species())
       << "\"];\n";
  }
  for (const auto& r : net.reactions()) {
    os << "  C" << r.source + 1 << " -> C" << r.target + 1 << " [label=\""
       << detail::format_real(r.rate, 6) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

/// Builds a network over given species and complexes whose reactions are the
/// nonzero off-diagonal entries of `ak`.
inline Network network_from_kinetics(const std::vector<std::string>& species,
                                      const std::vector<Complex>& complexes,
                                      const KineticsMatrix& ak) {
  if (ak.size() != complexes.size()) {
    throw std::invalid_argument("kinetics matrix size differs from the complex count");
  }
  Network net(species);
  for (const auto& c : complexes) net.append_new_complex(c);
  for (std::size_t source = 0; source < complexes.size(); ++source) {
    for (std::size_t target = 0; target < complexes.size(); ++target) {
      if (source != target && ak.rate(source, target) > 0.0) {
        net.add_reaction(source, target, ak.rate(source, target));
      }
    }
  }
  return net;
}

}  // namespace kinreal
