#pragma once

// CPLEX LP-format export and a plain "<name> <value>" solution import, for
// running an encoded model through an external solver.

#include <cctype>
#include <cstddef>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kinreal/milp/model.hpp"

namespace kinreal::milp {

/// Maps every variable to a name accepted by LP-format readers: characters
/// outside [A-Za-z0-9_.] become '_', names starting with a digit, '.', or
/// 'e'/'E' get a "v_" prefix, and collisions receive "_<k>" suffixes. The
/// result depends only on the declared names and their order.
inline std::vector<std::string> sanitized_names(const MilpModel& model) {
  std::vector<std::string> out;
  std::set<std::string> taken;
  for (const auto& v : model.variables()) {
    std::string name;
    for (char ch : v.name) {
      const auto u = static_cast<unsigned char>(ch);
      name += (std::isalnum(u) || ch == '_' || ch == '.') ? ch : '_';
    }
    if (name.empty()) name = "x" + std::to_string(v.id.index + 1);
    const char first = name.front();
    if (std::isdigit(static_cast<unsigned char>(first)) || first == '.' || first == 'e' ||
        first == 'E') {
      name = "v_" + name;
    }
    if (name.size() > 200) name.resize(200);
    std::string candidate = name;
    for (int k = 2; taken.count(candidate) != 0; ++k) candidate = name + "_" + std::to_string(k);
    taken.insert(candidate);
    out.push_back(std::move(candidate));
  }
  return out;
}

namespace detail {

inline std::string lp_number(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

inline void write_expression(std::ostringstream& os, const std::vector<LinearTerm>& terms,
                             const std::vector<std::string>& names, std::size_t indent) {
  std::size_t on_line = 0;
  bool first = true;
  for (const auto& t : terms) {
    if (on_line == 8) {
      os << '\n' << std::string(indent, ' ');
      on_line = 0;
    }
    const double c = t.coeff;
    if (first) {
      os << (c < 0 ? "- " : "") << lp_number(std::abs(c)) << ' ' << names[t.var.index];
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ") << lp_number(std::abs(c)) << ' ' << names[t.var.index];
    }
    ++on_line;
  }
  if (first) os << "0 " << (names.empty() ? std::string("x1") : names.front());
}

}  // namespace detail

inline std::string export_lp_file(const MilpModel& model) {
  const auto names = sanitized_names(model);
  std::ostringstream os;
  os << "\\ " << model.variable_count() << " variables ("
     << model.count(VarKind::binary) << " binary), " << model.constraint_count()
     << " constraints\n";
  os << "Minimize\n obj: ";
  detail::write_expression(os, model.objective(), names, 6);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < model.constraint_count(); ++r) {
    const auto& c = model.constraints()[r];
    os << " c" << r + 1 << ": ";
    detail::write_expression(os, c.terms, names, 4);
    switch (c.relation) {
      case Relation::less_equal: os << " <= "; break;
      case Relation::greater_equal: os << " >= "; break;
      case Relation::equal: os << " = "; break;
    }
    os << detail::lp_number(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : model.variables()) {
    if (v.kind == VarKind::binary) continue;
    const auto& name = names[v.id.index];
    const bool lower_inf = v.lower == -kInfinity;
    const bool upper_inf = v.upper == kInfinity;
    if (lower_inf && upper_inf) {
      os << ' ' << name << " free\n";
    } else if (v.lower == v.upper) {
      os << ' ' << name << " = " << detail::lp_number(v.lower) << '\n';
    } else if (upper_inf) {
      if (v.lower != 0.0) os << ' ' << name << " >= " << detail::lp_number(v.lower) << '\n';
    } else {
      os << ' ' << (lower_inf ? std::string("-inf") : detail::lp_number(v.lower)) << " <= "
         << name << " <= " << detail::lp_number(v.upper) << '\n';
    }
  }
  if (model.count(VarKind::binary) > 0) {
    os << "Binaries\n";
    for (const auto& v : model.variables()) {
      if (v.kind == VarKind::binary) os << ' ' << names[v.id.index] << '\n';
    }
  }
  os << "End\n";
  return os.str();
}

/// Reads "<variable name> <value>" lines (names as written by
/// export_lp_file). Blank lines and '#' comments are skipped; variables that
/// do not appear are taken as 0.
inline std::vector<double> import_solution(const MilpModel& model, std::string_view text) {
  const auto names = sanitized_names(model);
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < names.size(); ++j) index.emplace(names[j], j);
  std::vector<double> values(model.variable_count(), 0.0);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    double value = 0.0;
    if (!(fields >> value)) {
      throw std::runtime_error("solution line " + std::to_string(line_no) + ": missing value");
    }
    std::string extra;
    if (fields >> extra) {
      throw std::runtime_error("solution line " + std::to_string(line_no) + ": trailing text");
    }
    auto it = index.find(name);
    if (it == index.end()) {
      throw std::runtime_error("solution line " + std::to_string(line_no) +
                               ": unknown variable '" + name + "'");
    }
    values[it->second] = value;
  }
  return values;
}

}  // namespace kinreal::milp
