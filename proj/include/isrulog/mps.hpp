#pragma once

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "lp_model.hpp"

namespace isrulog {

namespace mps_detail {

inline std::string col_name(std::size_t j) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "C%07zu", j + 1);
  return buf;
}

inline std::string row_name(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "R%07zu", i + 1);
  return buf;
}

// Data line laid out on the fixed-format columns; wide numbers simply extend the field.
inline void entry(std::ostringstream& os, const std::string& f1, const std::string& f2, const std::string& f3) {
  os << "    " << std::left << std::setw(8) << f1 << "  " << std::setw(8) << f2 << "  " << f3 << "\n";
}

}  // namespace mps_detail

/// Fixed-format MPS. Columns and rows get generated 8-character names in declaration order;
/// model labels travel in comment lines so that import can restore them.
inline std::string export_mps(const MilpModel& model) {
  using namespace mps_detail;
  std::ostringstream os;
  const auto& vars = model.variables();
  const auto& rows = model.constraints();
  os << "NAME          " << model.name() << "\n";
  for (std::size_t j = 0; j < vars.size(); ++j) os << "* col " << col_name(j) << ' ' << vars[j].label << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) os << "* row " << row_name(i) << ' ' << rows[i].label << "\n";
  os << "ROWS\n";
  os << " N  OBJ\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char t = rows[i].sense == Sense::le ? 'L' : rows[i].sense == Sense::ge ? 'G' : 'E';
    os << ' ' << t << "  " << row_name(i) << "\n";
  }
  // Column-major entries in row order.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(vars.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& t : rows[i].terms) cols[t.var].push_back({i, t.coef});
  os << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    bool integ = vars[j].is_integer();
    if (integ != in_int) {
      char mk[16];
      std::snprintf(mk, sizeof mk, "M%07d", ++marker);
      os << "    " << std::left << std::setw(8) << mk << "  'MARKER'                 "
         << (integ ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = integ;
    }
    std::string cn = col_name(j);
    double c = model.objective()[j];
    if (c != 0.0 || cols[j].empty()) entry(os, cn, "OBJ", format_double(c));
    for (auto [i, a] : cols[j]) entry(os, cn, row_name(i), format_double(a));
  }
  if (in_int) {
    char mk[16];
    std::snprintf(mk, sizeof mk, "M%07d", ++marker);
    os << "    " << std::left << std::setw(8) << mk << "  'MARKER'                 'INTEND'\n";
  }
  os << "RHS\n";
  if (model.objective_constant() != 0.0) entry(os, "RHS", "OBJ", format_double(-model.objective_constant()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].rhs != 0.0) entry(os, "RHS", row_name(i), format_double(rows[i].rhs));
  os << "BOUNDS\n";
  auto bound = [&](const char* type, const std::string& cn, const std::string* v) {
    os << ' ' << type << " BND       " << std::left << std::setw(8) << cn;
    if (v) os << "  " << *v;
    os << "\n";
  };
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    std::string cn = col_name(j);
    if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) {
      bound("BV", cn, nullptr);
      continue;
    }
    bool fl = std::isfinite(v.lower), fu = std::isfinite(v.upper);
    if (fl && fu && v.lower == v.upper) {
      std::string s = format_double(v.lower);
      bound("FX", cn, &s);
      continue;
    }
    if (!fl && !fu) {
      bound("FR", cn, nullptr);
      continue;
    }
    if (!fl) bound("MI", cn, nullptr);
    if (fl && (v.lower != 0.0 || v.is_integer())) {
      std::string s = format_double(v.lower);
      bound("LO", cn, &s);
    }
    if (fu) {
      std::string s = format_double(v.upper);
      bound("UP", cn, &s);
    }
  }
  os << "ENDATA\n";
  return os.str();
}

/// Reads fixed-format MPS (fields separated by whitespace; names must not contain blanks).
inline MilpModel import_mps(const std::string& text) {
  enum Section { kNone, kName, kRows, kColumns, kRhs, kRanges, kBounds, kEnd };
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  Section sec = kNone;
  std::string name = "model";
  std::unordered_map<std::string, std::string> col_label, row_label;
  std::string obj_row;
  struct RowInfo {
    std::string name;
    Sense sense;
    double rhs = 0.0;
  };
  std::vector<RowInfo> rows;
  std::unordered_map<std::string, std::size_t> row_at;
  struct ColInfo {
    std::string name;
    bool integer = false;
    bool binary = false;
    double lo = 0.0, up = kInf;
    bool up_set = false, lo_set = false;
    double obj = 0.0;
    std::vector<Term> terms;
  };
  std::vector<ColInfo> cols;
  std::unordered_map<std::string, std::size_t> col_at;
  bool in_int = false;
  double obj_const = 0.0;

  auto number = [&](const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw MpsError(lineno, "bad number '" + s + "'");
    return v;
  };
  auto advance = [&](Section next, const std::string& kw) {
    if (next <= sec) throw MpsError(lineno, "section " + kw + " out of order");
    if (next >= kColumns && sec < kRows) throw MpsError(lineno, "section " + kw + " before ROWS");
    if (next > kColumns && sec < kColumns) throw MpsError(lineno, "section " + kw + " before COLUMNS");
    sec = next;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '*') {
      std::istringstream cs(line.substr(1));
      std::string kind, nm, label;
      cs >> kind >> nm >> label;
      if (!label.empty()) {
        if (kind == "col") col_label[nm] = label;
        else if (kind == "row") row_label[nm] = label;
      }
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    bool header = line[0] != ' ' && line[0] != '\t';
    if (header) {
      const std::string& kw = tok[0];
      if (kw == "NAME") {
        advance(kName, kw);
        if (tok.size() > 1) name = tok[1];
      } else if (kw == "ROWS") {
        advance(kRows, kw);
      } else if (kw == "COLUMNS") {
        advance(kColumns, kw);
      } else if (kw == "RHS") {
        advance(kRhs, kw);
      } else if (kw == "RANGES") {
        advance(kRanges, kw);
      } else if (kw == "BOUNDS") {
        advance(kBounds, kw);
      } else if (kw == "ENDATA") {
        advance(kEnd, kw);
      } else {
        throw MpsError(lineno, "unknown section " + kw);
      }
      continue;
    }
    switch (sec) {
      case kRows: {
        if (tok.size() != 2) throw MpsError(lineno, "ROWS entry needs type and name");
        const std::string& t = tok[0];
        if (t == "N") {
          if (obj_row.empty()) obj_row = tok[1];
          else throw MpsError(lineno, "more than one objective row");
          break;
        }
        Sense s;
        if (t == "L") s = Sense::le;
        else if (t == "G") s = Sense::ge;
        else if (t == "E") s = Sense::eq;
        else throw MpsError(lineno, "unknown row type " + t);
        if (row_at.count(tok[1])) throw MpsError(lineno, "duplicate row " + tok[1]);
        row_at[tok[1]] = rows.size();
        rows.push_back({tok[1], s, 0.0});
        break;
      }
      case kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_int = true;
          else if (tok[2] == "'INTEND'") in_int = false;
          else throw MpsError(lineno, "unknown marker " + tok[2]);
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) throw MpsError(lineno, "COLUMNS entry has wrong field count");
        auto it = col_at.find(tok[0]);
        std::size_t j;
        if (it == col_at.end()) {
          j = cols.size();
          col_at[tok[0]] = j;
          ColInfo ci;
          ci.name = tok[0];
          ci.integer = in_int;
          cols.push_back(ci);
        } else {
          j = it->second;
          if (j + 1 != cols.size()) throw MpsError(lineno, "column " + tok[0] + " is not contiguous");
        }
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          double v = number(tok[k + 1]);
          if (tok[k] == obj_row) {
            cols[j].obj += v;
          } else {
            auto r = row_at.find(tok[k]);
            if (r == row_at.end()) throw MpsError(lineno, "unknown row " + tok[k]);
            cols[j].terms.push_back({r->second, v});
          }
        }
        break;
      }
      case kRhs: {
        std::size_t k0 = tok.size() % 2 == 1 ? 1 : 0;
        for (std::size_t k = k0; k + 1 < tok.size(); k += 2) {
          double v = number(tok[k + 1]);
          if (tok[k] == obj_row) {
            obj_const = -v;
            continue;
          }
          auto r = row_at.find(tok[k]);
          if (r == row_at.end()) throw MpsError(lineno, "unknown row " + tok[k]);
          rows[r->second].rhs = v;
        }
        break;
      }
      case kRanges:
        throw MpsError(lineno, "RANGES entries are not supported");
      case kBounds: {
        const std::string& t = tok[0];
        bool novalue = t == "FR" || t == "MI" || t == "PL" || (t == "BV" && tok.size() <= 3);
        std::size_t need = novalue ? 2 : 3;
        std::size_t ci;
        if (tok.size() == need + 1) ci = 2;
        else if (tok.size() == need) ci = 1;
        else throw MpsError(lineno, "BOUNDS entry has wrong field count");
        auto it = col_at.find(tok[ci]);
        if (it == col_at.end()) throw MpsError(lineno, "unknown column " + tok[ci]);
        auto& c = cols[it->second];
        double v = novalue ? 0.0 : number(tok[ci + 1]);
        if (t == "UP") {
          c.up = v;
          c.up_set = true;
          if (v < 0 && !c.lo_set) c.lo = -kInf;
        } else if (t == "LO") {
          c.lo = v;
          c.lo_set = true;
        } else if (t == "FX") {
          c.lo = c.up = v;
          c.lo_set = c.up_set = true;
        } else if (t == "FR") {
          if (c.integer) throw MpsError(lineno, "free bound on integer column " + c.name);
          c.lo = -kInf;
          c.up = kInf;
        } else if (t == "MI") {
          if (c.integer) throw MpsError(lineno, "free bound on integer column " + c.name);
          c.lo = -kInf;
        } else if (t == "PL") {
          if (c.integer) throw MpsError(lineno, "free bound on integer column " + c.name);
          c.up = kInf;
        } else if (t == "BV") {
          c.binary = c.integer = true;
          c.lo = 0.0;
          c.up = 1.0;
        } else if (t == "LI") {
          c.integer = true;
          c.lo = v;
        } else if (t == "UI") {
          c.integer = true;
          c.up = v;
        } else {
          throw MpsError(lineno, "unknown bound type " + t);
        }
        break;
      }
      case kEnd:
        throw MpsError(lineno, "data after ENDATA");
      default:
        throw MpsError(lineno, "data outside a section");
    }
  }
  if (sec != kEnd) throw MpsError(lineno, "missing ENDATA");
  if (obj_row.empty()) throw MpsError(lineno, "no objective row");

  MilpModel m(name);
  for (const auto& c : cols) {
    auto lab = col_label.find(c.name);
    VarKind k = c.binary ? VarKind::binary : (c.integer ? VarKind::integer : VarKind::continuous);
    m.add_variable(lab != col_label.end() ? lab->second : c.name, k, c.lo, c.up, c.obj);
  }
  std::vector<std::vector<Term>> rterms(rows.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (const auto& t : cols[j].terms) rterms[t.var].push_back({j, t.coef});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto lab = row_label.find(rows[i].name);
    m.add_constraint(rterms[i], rows[i].sense, rows[i].rhs, lab != row_label.end() ? lab->second : rows[i].name);
  }
  m.set_objective_constant(obj_const);
  return m;
}

/// Structural equality up to labels: same bounds, kinds, objective, rows (term order ignored).
inline bool structurally_equal(const MilpModel& a, const MilpModel& b, std::string* why = nullptr) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (a.num_variables() != b.num_variables()) return fail("variable count");
  if (a.num_constraints() != b.num_constraints()) return fail("constraint count");
  if (a.objective_constant() != b.objective_constant()) return fail("objective constant");
  for (std::size_t j = 0; j < a.num_variables(); ++j) {
    const auto &u = a.variable(j), &v = b.variable(j);
    if (u.kind != v.kind || u.lower != v.lower || u.upper != v.upper) return fail("variable " + std::to_string(j));
    if (a.objective()[j] != b.objective()[j]) return fail("objective coefficient " + std::to_string(j));
  }
  for (std::size_t i = 0; i < a.num_constraints(); ++i) {
    const auto &r = a.constraint(i), &s = b.constraint(i);
    if (r.sense != s.sense || r.rhs != s.rhs || r.terms.size() != s.terms.size())
      return fail("constraint " + std::to_string(i));
    auto x = r.terms, y = s.terms;
    auto by_var = [](const Term& p, const Term& q) { return p.var < q.var; };
    std::sort(x.begin(), x.end(), by_var);
    std::sort(y.begin(), y.end(), by_var);
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k].var != y[k].var || x[k].coef != y[k].coef) return fail("constraint " + std::to_string(i) + " terms");
  }
  return true;
}

}  // namespace isrulog
