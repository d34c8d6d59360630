#include "vaxnet/mps.hpp"

#include "vaxnet/instance.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace vaxnet::mip {

MpsParseError::MpsParseError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "MPS line " + std::to_string(line) + ": " + what
                                  : "MPS: " + what),
      line_(line) {}

UnsupportedSection::UnsupportedSection(int line, std::string section)
    : MpsParseError(line, "unsupported section " + section), section_(std::move(section)) {}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  for (unsigned char ch : name)
    if (std::isspace(ch)) return false;
  return true;
}

// Pads `text` to `width`, keeping at least two separating blanks.
void field(std::ostream& out, const std::string& text, std::size_t width) {
  out << text;
  const std::size_t pad = text.size() + 2 <= width ? width - text.size() : 2;
  out << std::string(pad, ' ');
}

void entry_line(std::ostream& out, const std::string& first, const std::string& row,
                double value) {
  out << "    ";
  field(out, first, 10);
  field(out, row, 10);
  out << number(value) << '\n';
}

char row_type(Sense s) {
  switch (s) {
    case Sense::less_equal: return 'L';
    case Sense::greater_equal: return 'G';
    case Sense::equal: return 'E';
  }
  return 'E';
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

double parse_value(const std::string& text, int line) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw MpsParseError(line, "bad number '" + text + "'");
  return v;
}

}  // namespace

void write_mps(const MipModel& model, std::ostream& out) {
  for (const Variable& v : model.variables())
    if (!valid_name(v.name))
      throw std::invalid_argument("MPS export needs non-empty names without blanks: '" +
                                  v.name + "'");
  for (const Constraint& c : model.constraints())
    if (!valid_name(c.name))
      throw std::invalid_argument("MPS export needs non-empty names without blanks: '" +
                                  c.name + "'");
  const std::string model_name = model.name().empty() ? "MODEL" : model.name();
  if (!valid_name(model_name))
    throw std::invalid_argument("MPS export needs a model name without blanks");

  std::string objective = "COST";
  while (model.find_constraint(objective)) objective += '_';

  // Column-wise view of the rows.
  std::vector<std::vector<std::pair<int, double>>> by_column(model.num_variables());
  for (int i = 0; i < model.num_constraints(); ++i)
    for (const Term& t : model.constraint(i).terms) by_column[t.var].emplace_back(i, t.coef);

  out << "NAME          " << model_name << '\n';
  out << "ROWS\n";
  out << " N  " << objective << '\n';
  for (const Constraint& c : model.constraints())
    out << ' ' << row_type(c.sense) << "  " << c.name << '\n';

  out << "COLUMNS\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    entry_line(out, v.name, objective, v.objective);
    for (auto [i, coef] : by_column[j]) entry_line(out, v.name, model.constraint(i).name, coef);
  }

  out << "RHS\n";
  for (const Constraint& c : model.constraints())
    if (c.rhs != 0.0) entry_line(out, "RHS", c.name, c.rhs);

  out << "BOUNDS\n";
  auto bound = [&](const char* type, const std::string& name, std::optional<double> value) {
    out << ' ' << type << ' ';
    field(out, "BND", 10);
    if (value) {
      field(out, name, 10);
      out << number(*value);
    } else {
      out << name;
    }
    out << '\n';
  };
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::binary) {
      bound("BV", v.name, std::nullopt);
      continue;
    }
    const bool lo_inf = std::isinf(v.lower), up_inf = std::isinf(v.upper);
    if (lo_inf && up_inf) {
      bound("FR", v.name, std::nullopt);
    } else if (!lo_inf && !up_inf && v.lower == v.upper) {
      bound("FX", v.name, v.lower);
    } else {
      if (lo_inf) bound("MI", v.name, std::nullopt);
      else if (v.lower != 0.0) bound("LO", v.name, v.lower);
      if (!up_inf) bound("UP", v.name, v.upper);
    }
  }
  out << "ENDATA\n";
}

void export_mps(const MipModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write MPS file " + path.string());
  write_mps(model, out);
  if (!out) throw IoError("failed writing " + path.string());
}

MipModel read_mps(std::istream& in) {
  enum class Section { none, name, rows, columns, rhs, bounds, done };
  Section section = Section::none;

  std::string model_name;
  std::string objective;
  struct RowInfo {
    std::string name;
    Sense sense;
    double rhs = 0.0;
    std::vector<Term> terms;
  };
  std::vector<RowInfo> rows;
  std::unordered_map<std::string, int> row_index;
  std::vector<Variable> vars;
  std::unordered_map<std::string, int> var_index;
  std::vector<bool> integer_marked, bounds_seen;
  bool in_marker = false;
  bool seen_name = false;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    const auto tok = tokens(line);
    if (tok.empty()) continue;

    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& head = tok[0];
      if (head == "NAME") {
        if (seen_name) throw MpsParseError(lineno, "duplicate NAME section");
        seen_name = true;
        model_name = tok.size() > 1 ? tok[1] : "";
        section = Section::name;
      } else if (head == "ROWS") {
        section = Section::rows;
      } else if (head == "COLUMNS") {
        section = Section::columns;
      } else if (head == "RHS") {
        section = Section::rhs;
      } else if (head == "BOUNDS") {
        section = Section::bounds;
      } else if (head == "ENDATA") {
        section = Section::done;
        break;
      } else if (head == "OBJSENSE") {
        // Only minimization is supported; accept an explicit MIN.
        if (tok.size() > 1 && (tok[1] == "MIN" || tok[1] == "MINIMIZE")) continue;
        std::string next;
        if (tok.size() == 1 && std::getline(in, next)) {
          ++lineno;
          const auto t = tokens(next);
          if (!t.empty() && (t[0] == "MIN" || t[0] == "MINIMIZE")) continue;
        }
        throw UnsupportedSection(lineno, "OBJSENSE MAX");
      } else if (head == "RANGES" || head == "SOS" || head == "QUADOBJ" ||
                 head == "QSECTION" || head == "QMATRIX" || head == "QCMATRIX" ||
                 head == "INDICATORS" || head == "OBJNAME") {
        throw UnsupportedSection(lineno, head);
      } else {
        throw MpsParseError(lineno, "unknown section '" + head + "'");
      }
      continue;
    }

    switch (section) {
      case Section::none:
      case Section::name:
      case Section::done:
        throw MpsParseError(lineno, "data outside of a section");
      case Section::rows: {
        if (tok.size() != 2) throw MpsParseError(lineno, "ROWS entry needs a type and a name");
        const std::string& type = tok[0];
        if (type == "N") {
          if (!objective.empty()) throw MpsParseError(lineno, "second objective row " + tok[1]);
          objective = tok[1];
          continue;
        }
        Sense sense;
        if (type == "E") sense = Sense::equal;
        else if (type == "L") sense = Sense::less_equal;
        else if (type == "G") sense = Sense::greater_equal;
        else throw MpsParseError(lineno, "unknown row type '" + type + "'");
        if (tok[1] == objective || row_index.count(tok[1]))
          throw MpsParseError(lineno, "duplicate row " + tok[1]);
        row_index.emplace(tok[1], static_cast<int>(rows.size()));
        rows.push_back({tok[1], sense, 0.0, {}});
        break;
      }
      case Section::columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_marker = true;
          else if (tok[2] == "'INTEND'") in_marker = false;
          else throw MpsParseError(lineno, "unknown marker " + tok[2]);
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5)
          throw MpsParseError(lineno, "COLUMNS entry needs a column and one or two row/value pairs");
        auto [it, fresh] = var_index.emplace(tok[0], static_cast<int>(vars.size()));
        if (fresh) {
          Variable v;
          v.name = tok[0];
          vars.push_back(v);
          integer_marked.push_back(in_marker);
          bounds_seen.push_back(false);
        } else if (it->second != static_cast<int>(vars.size()) - 1) {
          throw MpsParseError(lineno, "column " + tok[0] + " is not contiguous");
        }
        const int j = it->second;
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double value = parse_value(tok[k + 1], lineno);
          if (tok[k] == objective) {
            vars[j].objective = value;
            continue;
          }
          auto r = row_index.find(tok[k]);
          if (r == row_index.end()) throw MpsParseError(lineno, "unknown row " + tok[k]);
          rows[r->second].terms.push_back({j, value});
        }
        break;
      }
      case Section::rhs: {
        if (tok.size() != 3 && tok.size() != 5)
          throw MpsParseError(lineno, "RHS entry needs a set name and one or two row/value pairs");
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double value = parse_value(tok[k + 1], lineno);
          if (tok[k] == objective) {
            if (value != 0.0) throw MpsParseError(lineno, "objective constants are not supported");
            continue;
          }
          auto r = row_index.find(tok[k]);
          if (r == row_index.end()) throw MpsParseError(lineno, "unknown row " + tok[k]);
          rows[r->second].rhs = value;
        }
        break;
      }
      case Section::bounds: {
        if (tok.size() < 3) throw MpsParseError(lineno, "BOUNDS entry is too short");
        const std::string& type = tok[0];
        auto v = var_index.find(tok[2]);
        if (v == var_index.end()) throw MpsParseError(lineno, "unknown column " + tok[2]);
        Variable& var = vars[v->second];
        bounds_seen[v->second] = true;
        const bool valued = type == "UP" || type == "LO" || type == "FX";
        if (valued != (tok.size() == 4) || tok.size() > 4)
          throw MpsParseError(lineno, "bad field count for bound " + type);
        const double value = valued ? parse_value(tok[3], lineno) : 0.0;
        if (type == "BV") {
          var.kind = VarKind::binary;
          var.lower = 0.0;
          var.upper = 1.0;
        } else if (type == "UP") {
          var.upper = value;
        } else if (type == "LO") {
          var.lower = value;
        } else if (type == "FX") {
          var.lower = var.upper = value;
        } else if (type == "FR") {
          var.lower = -kInfinity;
          var.upper = kInfinity;
        } else if (type == "MI") {
          var.lower = -kInfinity;
        } else if (type == "PL") {
          var.upper = kInfinity;
        } else {
          throw MpsParseError(lineno, "unsupported bound type " + type);
        }
        break;
      }
    }
  }
  if (section != Section::done) throw MpsParseError(lineno, "missing ENDATA");
  if (objective.empty()) throw MpsParseError(0, "no objective (N) row");

  MipModel model(model_name);
  for (std::size_t j = 0; j < vars.size(); ++j) {
    Variable v = vars[j];
    if (integer_marked[j] && v.kind != VarKind::binary) {
      if (!bounds_seen[j]) v.upper = 1.0;
      if (v.lower != 0.0 || v.upper != 1.0)
        throw MpsParseError(0, "general integer column " + v.name + " is not supported");
      v.kind = VarKind::binary;
    }
    model.add_variable(std::move(v));
  }
  for (RowInfo& r : rows) model.add_constraint(r.name, std::move(r.terms), r.sense, r.rhs);
  return model;
}

MipModel import_mps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open MPS file " + path.string());
  return read_mps(in);
}

}  // namespace vaxnet::mip
