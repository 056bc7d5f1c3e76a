#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "polarize/error.hpp"
#include "polarize/lp.hpp"

namespace polarize {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string row_name(std::size_t r) { return "c" + std::to_string(r); }

// Column-major copy of the constraint matrix, rows ascending within each column.
struct Transposed {
  std::vector<std::size_t> start;
  std::vector<std::size_t> row;
  std::vector<double> value;
};

Transposed transpose(const LinearProgram& lp) {
  Transposed t;
  const std::size_t n = lp.num_variables();
  t.start.assign(n + 1, 0);
  for (int c : lp.columns()) ++t.start[static_cast<std::size_t>(c) + 1];
  for (std::size_t j = 0; j < n; ++j) t.start[j + 1] += t.start[j];
  t.row.resize(lp.num_nonzeros());
  t.value.resize(lp.num_nonzeros());
  std::vector<std::size_t> fill(t.start.begin(), t.start.end() - 1);
  const auto starts = lp.row_start();
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    for (std::size_t k = starts[r]; k < starts[r + 1]; ++k) {
      const auto c = static_cast<std::size_t>(lp.columns()[k]);
      t.row[fill[c]] = r;
      t.value[fill[c]] = lp.values()[k];
      ++fill[c];
    }
  }
  return t;
}

void write_mps(const LinearProgram& lp, std::ostream& out) {
  out << "NAME polarize\n";
  out << "OBJSENSE\n    MIN\n";
  out << "ROWS\n N obj\n";
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const char* tag = "E";
    if (lp.row(r).relation == Relation::LessEqual) tag = "L";
    if (lp.row(r).relation == Relation::GreaterEqual) tag = "G";
    out << ' ' << tag << ' ' << row_name(r) << '\n';
  }

  std::vector<double> cost(lp.num_variables(), 0.0);
  for (std::size_t k = 0; k < lp.objective_columns().size(); ++k) {
    cost[static_cast<std::size_t>(lp.objective_columns()[k])] += lp.objective_values()[k];
  }
  const Transposed t = transpose(lp);
  const auto& names = lp.variable_names();
  out << "COLUMNS\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    const bool empty = t.start[j] == t.start[j + 1];
    // every column is declared here, even when it has no entries
    if (cost[j] != 0.0 || empty) out << "    " << names[j] << " obj " << num(cost[j]) << '\n';
    for (std::size_t k = t.start[j]; k < t.start[j + 1]; ++k) {
      out << "    " << names[j] << ' ' << row_name(t.row[k]) << ' ' << num(t.value[k]) << '\n';
    }
  }

  out << "RHS\n";
  // objective constant c0 is written as -c0 on the objective row
  if (lp.objective_constant() != 0.0) out << "    RHS obj " << num(-lp.objective_constant()) << '\n';
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    if (lp.row(r).rhs != 0.0) out << "    RHS " << row_name(r) << ' ' << num(lp.row(r).rhs) << '\n';
  }

  out << "BOUNDS\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    const double lo = lp.lower()[j];
    const double hi = lp.upper()[j];
    const std::string& name = names[j];
    if (lo == hi) {
      out << " FX BND " << name << ' ' << num(lo) << '\n';
      continue;
    }
    if (lo == -kInfinity && hi == kInfinity) {
      out << " FR BND " << name << '\n';
      continue;
    }
    if (lo == -kInfinity) {
      out << " MI BND " << name << '\n';
    } else if (lo != 0.0) {
      out << " LO BND " << name << ' ' << num(lo) << '\n';
    }
    if (hi != kInfinity) out << " UP BND " << name << ' ' << num(hi) << '\n';
  }
  out << "ENDATA\n";
}

// Splits long expressions; LP-text readers limit line length.
class LineWriter {
 public:
  explicit LineWriter(std::ostream& out) : out_(out) {}
  void put(const std::string& token) {
    if (width_ + token.size() + 1 > 200) {
      out_ << "\n   ";
      width_ = 3;
    }
    out_ << ' ' << token;
    width_ += token.size() + 1;
  }
  void start(const std::string& head) {
    out_ << head;
    width_ = head.size();
  }
  void end() { out_ << '\n'; }

 private:
  std::ostream& out_;
  std::size_t width_ = 0;
};

void put_term(LineWriter& w, double coeff, const std::string& name, bool first) {
  if (coeff < 0) {
    w.put("- " + num(-coeff) + " " + name);
  } else {
    w.put((first ? "" : "+ ") + num(coeff) + " " + name);
  }
}

void write_lp_text(const LinearProgram& lp, std::ostream& out) {
  std::vector<std::string> names;
  names.reserve(lp.num_variables());
  for (const auto& n : lp.variable_names()) names.push_back(lp_text_name(n));

  LineWriter w(out);
  out << "\\ polarize hierarchy LP\n";
  out << "Minimize\n";
  w.start(" obj:");
  const auto oc = lp.objective_columns();
  const auto ov = lp.objective_values();
  for (std::size_t k = 0; k < oc.size(); ++k) put_term(w, ov[k], names[static_cast<std::size_t>(oc[k])], k == 0);
  if (oc.empty() && !names.empty()) w.put("0 " + names[0]);
  if (lp.objective_constant() != 0.0) {
    const double c = lp.objective_constant();
    w.put((c < 0 ? "- " : "+ ") + num(std::abs(c)));
  }
  w.end();

  out << "Subject To\n";
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto row = lp.row(r);
    w.start(" " + row_name(r) + ":");
    for (std::size_t k = 0; k < row.columns.size(); ++k) {
      put_term(w, row.values[k], names[static_cast<std::size_t>(row.columns[k])], k == 0);
    }
    const char* rel = row.relation == Relation::LessEqual ? "<=" : row.relation == Relation::Equal ? "=" : ">=";
    w.put(std::string(rel) + " " + num(row.rhs));
    w.end();
  }

  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    const double lo = lp.lower()[j];
    const double hi = lp.upper()[j];
    if (lo == hi) {
      out << ' ' << names[j] << " = " << num(lo) << '\n';
    } else if (lo == -kInfinity && hi == kInfinity) {
      out << ' ' << names[j] << " free\n";
    } else {
      out << ' ' << (lo == -kInfinity ? std::string("-inf") : num(lo)) << " <= " << names[j] << " <= "
          << (hi == kInfinity ? std::string("+inf") : num(hi)) << '\n';
    }
  }
  out << "End\n";
}

}  // namespace

std::string lp_text_name(std::string_view name) {
  std::string out(name);
  for (char& ch : out) {
    if (ch == '+') ch = '.';
    if (ch == '[') ch = '(';
    if (ch == ']') ch = ')';
  }
  return out;
}

void write_lp(const LinearProgram& lp, ExportFormat format, std::ostream& out) {
  if (format == ExportFormat::FreeMps) {
    write_mps(lp, out);
  } else {
    write_lp_text(lp, out);
  }
}

void export_lp(const LinearProgram& lp, ExportFormat format, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::IOError, "cannot open " + path.string() + " for writing");
  write_lp(lp, format, file);
  file.flush();
  if (!file) throw Error(ErrorKind::IOError, "write to " + path.string() + " failed");
}

}  // namespace polarize
