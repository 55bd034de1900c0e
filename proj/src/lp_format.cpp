#include "ponplace/lp_format.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "ponplace/text_io.hpp"

namespace ponplace {

namespace {

// Emits "+/- coef name" tokens, wrapping lines to keep the file readable.
// Every coefficient is written explicitly (including 1) to keep the grammar
// trivial for downstream parsers.
class TermWriter {
 public:
  TermWriter(std::ostream& out, const MilpInstance& m) : out_(out), m_(m) {}

  void write(const std::vector<LinTerm>& terms) {
    int on_line = 0;
    for (const LinTerm& t : terms) {
      if (on_line == 8) {
        out_ << "\n   ";
        on_line = 0;
      }
      const double c = t.coef;
      out_ << (c < 0 ? " - " : " + ") << fmt_double(std::fabs(c)) << " "
           << m_.vars()[t.var].name;
      ++on_line;
    }
    if (terms.empty()) out_ << " 0 " << m_.vars()[0].name;  // degenerate row
  }

 private:
  std::ostream& out_;
  const MilpInstance& m_;
};

const char* sense_str(ConstraintSense s) {
  switch (s) {
    case ConstraintSense::LE: return "<=";
    case ConstraintSense::EQ: return "=";
    case ConstraintSense::GE: return ">=";
  }
  return "?";
}

}  // namespace

void export_lp(const MilpInstance& m, std::ostream& out) {
  TermWriter tw(out, m);
  out << "\\ ponplace MILP export\n";
  out << "\\ mode: " << to_string(m.mode()) << "\n";
  out << "\\ topology_hash: " << m.topology_hash() << "\n";
  out << "\\ workload_hash: " << m.workload_hash() << "\n";
  out << "Minimize\n obj:";
  tw.write(m.objective());
  out << "\nSubject To\n";
  for (const Constraint& c : m.constraints()) {
    out << " " << c.name << ":";
    tw.write(c.terms);
    out << " " << sense_str(c.sense) << " " << fmt_double(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const Variable& v : m.vars()) {
    if (v.kind == VarKind::Binary) continue;  // declared in Binaries
    if (std::isinf(v.ub)) {
      // default LP bound [0, inf) -- only non-zero lower bounds need a row
      if (v.lb != 0.0) out << " " << fmt_double(v.lb) << " <= " << v.name << "\n";
    } else {
      out << " " << fmt_double(v.lb) << " <= " << v.name << " <= " << fmt_double(v.ub)
          << "\n";
    }
  }
  out << "Binaries\n";
  int on_line = 0;
  for (const Variable& v : m.vars()) {
    if (v.kind != VarKind::Binary) continue;
    out << " " << v.name;
    if (++on_line == 10) {
      out << "\n";
      on_line = 0;
    }
  }
  if (on_line) out << "\n";
  out << "End\n";
}

std::string to_lp_string(const MilpInstance& m) {
  std::ostringstream ss;
  export_lp(m, ss);
  return ss.str();
}

}  // namespace ponplace
