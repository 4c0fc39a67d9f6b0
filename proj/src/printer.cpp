#include "slent/printer.hpp"

#include <sstream>

namespace slent {

std::string render(const Term &t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t.var_name();
    case Term::Kind::Const:
      return std::to_string(t.const_value());
    case Term::Kind::Sum:
      return render(t.lhs()) + "+" + render(t.rhs());
  }
  return "?";
}

static std::string render_pure(const PureFormula &f, bool parenthesize) {
  using K = PureFormula::Kind;
  switch (f.kind()) {
    case K::True:
      return "true";
    case K::False:
      return "false";
    case K::Eq:
      return render(f.lhs()) + " = " + render(f.rhs());
    case K::Neq:
      return render(f.lhs()) + " != " + render(f.rhs());
    case K::Le:
      return render(f.lhs()) + " <= " + render(f.rhs());
    case K::Lt:
      return render(f.lhs()) + " < " + render(f.rhs());
    case K::And: {
      std::string out;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += " & ";
        out += render_pure(f.children()[i], true);
      }
      return parenthesize ? out : out;
    }
    // The disjunctive/negative/quantified forms have no surface syntax; they
    // are printed for diagnostics only.
    case K::Or: {
      std::string out = "(";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += " | ";
        out += render_pure(f.children()[i], true);
      }
      return out + ")";
    }
    case K::Not:
      return "!(" + render_pure(f.children()[0], true) + ")";
    case K::Exists:
      return "(EX " + f.bound_var() + ". " + render_pure(f.children()[0], true) + ")";
  }
  return "?";
}

std::string render(const PureFormula &f) { return render_pure(f, false); }

std::string render(const SpatialAtom &a) {
  using K = SpatialAtom::Kind;
  switch (a.kind) {
    case K::Emp:
      return "Emp";
    case K::PointsTo: {
      std::string out = render(a.args[0]) + " -> (";
      for (std::size_t i = 1; i < a.args.size(); ++i) {
        if (i > 1) out += ",";
        out += render(a.args[i]);
      }
      return out + ")";
    }
    case K::Arr:
      return "Arr(" + render(a.args[0]) + "," + render(a.args[1]) + ")";
    case K::Ls:
      return "ls(" + render(a.args[0]) + "," + render(a.args[1]) + ")";
    case K::Dll:
      return "dll(" + render(a.args[0]) + "," + render(a.args[1]) + "," + render(a.args[2]) +
             "," + render(a.args[3]) + ")";
  }
  return "?";
}

std::string render(const SpatialFormula &s) {
  if (s.empty()) return "Emp";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += " * ";
    out += render(s[i]);
  }
  return out;
}

std::string render(const SymbolicHeap &h) {
  std::string out;
  if (!h.bound_vars.empty()) {
    out += "Ex";
    for (const auto &v : h.bound_vars) out += " " + v;
    out += " . ";
  }
  if (h.pure.kind() != PureFormula::Kind::True) out += render(h.pure) + " & ";
  out += render(h.spatial);
  return out;
}

std::string render(const Entailment &e) {
  std::string out = render(e.antecedent) + " |-";
  for (std::size_t i = 0; i < e.succedents.size(); ++i) {
    out += i ? " , " : " ";
    out += render(e.succedents[i]);
  }
  return out;
}

}  // namespace slent
