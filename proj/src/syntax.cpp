#include "slent/syntax.hpp"

#include <algorithm>
#include <cassert>

namespace slent {

// ---------------------------------------------------------------------------
// Term

Term Term::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::nat(std::uint64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = value;
  return Term(std::move(n));
}

Term Term::sum(Term lhs, Term rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->args = {std::move(lhs), std::move(rhs)};
  return Term(std::move(n));
}

int Term::compare(const Term &a, const Term &b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Kind::Var:
      return a.var_name().compare(b.var_name());
    case Kind::Const:
      if (a.const_value() == b.const_value()) return 0;
      return a.const_value() < b.const_value() ? -1 : 1;
    case Kind::Sum: {
      int c = compare(a.lhs(), b.lhs());
      if (c != 0) return c;
      return compare(a.rhs(), b.rhs());
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// PureFormula

PureFormula::PureFormula() : PureFormula(truth()) {}

PureFormula PureFormula::truth() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::True;
  return PureFormula(std::move(n));
}

PureFormula PureFormula::falsity() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::False;
  return PureFormula(std::move(n));
}

PureFormula PureFormula::atom(Kind k, Term l, Term r) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = {std::move(l), std::move(r)};
  return PureFormula(std::move(n));
}

PureFormula PureFormula::eq(Term l, Term r) { return atom(Kind::Eq, std::move(l), std::move(r)); }
PureFormula PureFormula::neq(Term l, Term r) { return atom(Kind::Neq, std::move(l), std::move(r)); }
PureFormula PureFormula::le(Term l, Term r) { return atom(Kind::Le, std::move(l), std::move(r)); }
PureFormula PureFormula::lt(Term l, Term r) { return atom(Kind::Lt, std::move(l), std::move(r)); }

PureFormula PureFormula::conj(std::vector<PureFormula> fs) {
  std::vector<PureFormula> kids;
  for (auto &f : fs) {
    if (f.kind() == Kind::True) continue;
    if (f.kind() == Kind::And) {
      for (auto &k : f.children()) kids.push_back(k);
    } else {
      kids.push_back(std::move(f));
    }
  }
  if (kids.empty()) return truth();
  if (kids.size() == 1) return kids[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->children = std::move(kids);
  return PureFormula(std::move(n));
}

PureFormula PureFormula::disj(std::vector<PureFormula> fs) {
  std::vector<PureFormula> kids;
  for (auto &f : fs) {
    if (f.kind() == Kind::False) continue;
    if (f.kind() == Kind::Or) {
      for (auto &k : f.children()) kids.push_back(k);
    } else {
      kids.push_back(std::move(f));
    }
  }
  if (kids.empty()) return falsity();
  if (kids.size() == 1) return kids[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->children = std::move(kids);
  return PureFormula(std::move(n));
}

PureFormula PureFormula::negation(PureFormula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->children = {std::move(f)};
  return PureFormula(std::move(n));
}

PureFormula PureFormula::exists(std::string var, PureFormula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exists;
  n->var = std::move(var);
  n->children = {std::move(body)};
  return PureFormula(std::move(n));
}

bool PureFormula::is_atom() const {
  switch (kind()) {
    case Kind::Eq:
    case Kind::Neq:
    case Kind::Le:
    case Kind::Lt:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// SpatialAtom

SpatialAtom SpatialAtom::points_to(Term addr, std::vector<Term> values) {
  SpatialAtom a;
  a.kind = Kind::PointsTo;
  a.args.reserve(values.size() + 1);
  a.args.push_back(std::move(addr));
  for (auto &v : values) a.args.push_back(std::move(v));
  return a;
}

bool SpatialAtom::operator==(const SpatialAtom &other) const {
  if (kind != other.kind || args.size() != other.args.size()) return false;
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i] != other.args[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Free variables

static void collect_vars(const Term &t, std::set<std::string> &out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out.insert(t.var_name());
      break;
    case Term::Kind::Const:
      break;
    case Term::Kind::Sum:
      collect_vars(t.lhs(), out);
      collect_vars(t.rhs(), out);
      break;
  }
}

std::set<std::string> free_vars(const Term &t) {
  std::set<std::string> out;
  collect_vars(t, out);
  return out;
}

static void collect_vars(const PureFormula &f, std::set<std::string> &out) {
  using K = PureFormula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False:
      break;
    case K::Eq:
    case K::Neq:
    case K::Le:
    case K::Lt:
      collect_vars(f.lhs(), out);
      collect_vars(f.rhs(), out);
      break;
    case K::And:
    case K::Or:
    case K::Not:
      for (const auto &k : f.children()) collect_vars(k, out);
      break;
    case K::Exists: {
      std::set<std::string> inner;
      collect_vars(f.children()[0], inner);
      inner.erase(f.bound_var());
      out.insert(inner.begin(), inner.end());
      break;
    }
  }
}

std::set<std::string> free_vars(const PureFormula &f) {
  std::set<std::string> out;
  collect_vars(f, out);
  return out;
}

std::set<std::string> free_vars(const SpatialAtom &a) {
  std::set<std::string> out;
  for (const auto &t : a.args) collect_vars(t, out);
  return out;
}

std::set<std::string> free_vars(const SpatialFormula &s) {
  std::set<std::string> out;
  for (const auto &a : s)
    for (const auto &t : a.args) collect_vars(t, out);
  return out;
}

std::set<std::string> free_vars(const SymbolicHeap &h) {
  std::set<std::string> out = free_vars(h.pure);
  auto sp = free_vars(h.spatial);
  out.insert(sp.begin(), sp.end());
  for (const auto &v : h.bound_vars) out.erase(v);
  return out;
}

std::set<std::string> free_vars(const Entailment &e) {
  std::set<std::string> out = free_vars(e.antecedent);
  for (const auto &s : e.succedents) {
    auto fv = free_vars(s);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// FreshGen

std::string FreshGen::fresh(const std::string &base) {
  std::string stem = base.substr(0, base.find('#'));
  if (stem.empty()) stem = "v";
  for (;;) {
    std::string cand = stem + "#" + std::to_string(counter_++);
    if (!avoid_.count(cand)) {
      avoid_.insert(cand);
      return cand;
    }
  }
}

void FreshGen::avoid(const std::set<std::string> &names) {
  avoid_.insert(names.begin(), names.end());
}

// ---------------------------------------------------------------------------
// Substitution

Term substitute(const Term &t, const TermSubst &subst) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = subst.find(t.var_name());
      return it == subst.end() ? t : it->second;
    }
    case Term::Kind::Const:
      return t;
    case Term::Kind::Sum:
      return Term::sum(substitute(t.lhs(), subst), substitute(t.rhs(), subst));
  }
  return t;
}

PureFormula substitute(const PureFormula &f, const TermSubst &subst, FreshGen &fresh) {
  using K = PureFormula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False:
      return f;
    case K::Eq:
      return PureFormula::eq(substitute(f.lhs(), subst), substitute(f.rhs(), subst));
    case K::Neq:
      return PureFormula::neq(substitute(f.lhs(), subst), substitute(f.rhs(), subst));
    case K::Le:
      return PureFormula::le(substitute(f.lhs(), subst), substitute(f.rhs(), subst));
    case K::Lt:
      return PureFormula::lt(substitute(f.lhs(), subst), substitute(f.rhs(), subst));
    case K::And:
    case K::Or: {
      std::vector<PureFormula> kids;
      kids.reserve(f.children().size());
      for (const auto &k : f.children()) kids.push_back(substitute(k, subst, fresh));
      return f.kind() == K::And ? PureFormula::conj(std::move(kids))
                                : PureFormula::disj(std::move(kids));
    }
    case K::Not:
      return PureFormula::negation(substitute(f.children()[0], subst, fresh));
    case K::Exists: {
      const std::string &x = f.bound_var();
      TermSubst inner = subst;
      inner.erase(x);
      // Rename the binder when it would capture a variable of the range.
      bool captures = false;
      for (const auto &[from, to] : inner)
        if (free_vars(to).count(x)) captures = true;
      if (captures) {
        std::string nx = fresh.fresh(x);
        inner.insert_or_assign(x, Term::var(nx));
        return PureFormula::exists(nx, substitute(f.children()[0], inner, fresh));
      }
      if (inner.empty()) return f;
      return PureFormula::exists(x, substitute(f.children()[0], inner, fresh));
    }
  }
  return f;
}

SpatialAtom substitute(const SpatialAtom &a, const TermSubst &subst) {
  SpatialAtom out = a;
  for (auto &t : out.args) t = substitute(t, subst);
  return out;
}

SpatialFormula substitute(const SpatialFormula &s, const TermSubst &subst) {
  SpatialFormula out;
  out.reserve(s.size());
  for (const auto &a : s) out.push_back(substitute(a, subst));
  return out;
}

SymbolicHeap substitute(const SymbolicHeap &h, const TermSubst &subst, FreshGen &fresh) {
  TermSubst inner = subst;
  for (const auto &v : h.bound_vars) inner.erase(v);
  // Capture check against the range of the substitution.
  bool captures = false;
  for (const auto &[from, to] : inner) {
    auto fv = free_vars(to);
    for (const auto &v : h.bound_vars)
      if (fv.count(v)) captures = true;
  }
  SymbolicHeap out;
  out.bound_vars = h.bound_vars;
  if (captures) {
    for (auto &v : out.bound_vars) {
      std::string nv = fresh.fresh(v);
      inner.insert_or_assign(v, Term::var(nv));
      v = nv;
    }
  }
  out.pure = substitute(h.pure, inner, fresh);
  out.spatial = substitute(h.spatial, inner);
  return out;
}

// ---------------------------------------------------------------------------
// Queries

std::set<Term> spatial_terms(const SpatialFormula &s) {
  std::set<Term> out;
  for (const auto &a : s)
    for (const auto &t : a.args) out.insert(t);
  return out;
}

bool is_list_free(const SpatialAtom &a) {
  return a.kind != SpatialAtom::Kind::Ls && a.kind != SpatialAtom::Kind::Dll;
}

bool is_list_free(const SpatialFormula &s) {
  return std::all_of(s.begin(), s.end(), [](const SpatialAtom &a) { return is_list_free(a); });
}

bool is_list_free(const SymbolicHeap &h) { return is_list_free(h.spatial); }

bool is_list_free(const Entailment &e) {
  if (!is_list_free(e.antecedent)) return false;
  for (const auto &s : e.succedents)
    if (!is_list_free(s)) return false;
  return true;
}

std::size_t count_points_to(const SpatialFormula &s) {
  return std::count_if(s.begin(), s.end(), [](const SpatialAtom &a) {
    return a.kind == SpatialAtom::Kind::PointsTo;
  });
}

std::size_t count_lists(const SpatialFormula &s) {
  return std::count_if(s.begin(), s.end(), [](const SpatialAtom &a) {
    return a.kind == SpatialAtom::Kind::Ls || a.kind == SpatialAtom::Kind::Dll;
  });
}

// ---------------------------------------------------------------------------
// Equality and alpha-equivalence

bool equal(const PureFormula &a, const PureFormula &b) {
  using K = PureFormula::Kind;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case K::True:
    case K::False:
      return true;
    case K::Eq:
    case K::Neq:
    case K::Le:
    case K::Lt:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case K::And:
    case K::Or: {
      if (a.children().size() != b.children().size()) return false;
      for (std::size_t i = 0; i < a.children().size(); ++i)
        if (!equal(a.children()[i], b.children()[i])) return false;
      return true;
    }
    case K::Not:
      return equal(a.children()[0], b.children()[0]);
    case K::Exists:
      return a.bound_var() == b.bound_var() && equal(a.children()[0], b.children()[0]);
  }
  return false;
}

bool equal(const SymbolicHeap &a, const SymbolicHeap &b) {
  if (a.bound_vars != b.bound_vars) return false;
  if (!equal(a.pure, b.pure)) return false;
  if (a.spatial.size() != b.spatial.size()) return false;
  for (std::size_t i = 0; i < a.spatial.size(); ++i)
    if (!(a.spatial[i] == b.spatial[i])) return false;
  return true;
}

// Canonically rename binders (heap-level and pure-level) to indexed names.
static PureFormula canon_pure(const PureFormula &f, std::uint64_t &counter, FreshGen &fresh) {
  if (f.kind() == PureFormula::Kind::Exists) {
    std::string cname = "@" + std::to_string(counter++);
    TermSubst s{{f.bound_var(), Term::var(cname)}};
    PureFormula body = substitute(f.children()[0], s, fresh);
    return PureFormula::exists(cname, canon_pure(body, counter, fresh));
  }
  using K = PureFormula::Kind;
  switch (f.kind()) {
    case K::And:
    case K::Or: {
      std::vector<PureFormula> kids;
      for (const auto &k : f.children()) kids.push_back(canon_pure(k, counter, fresh));
      return f.kind() == K::And ? PureFormula::conj(std::move(kids))
                                : PureFormula::disj(std::move(kids));
    }
    case K::Not:
      return PureFormula::negation(canon_pure(f.children()[0], counter, fresh));
    default:
      return f;
  }
}

static SymbolicHeap canon_heap(const SymbolicHeap &h) {
  FreshGen fresh(free_vars(h));
  SymbolicHeap out;
  TermSubst s;
  std::uint64_t counter = 0;
  for (const auto &v : h.bound_vars) {
    std::string cname = "@b" + std::to_string(counter++);
    s.insert_or_assign(v, Term::var(cname));
    out.bound_vars.push_back(cname);
  }
  out.pure = substitute(h.pure, s, fresh);
  out.spatial = substitute(h.spatial, s);
  std::uint64_t pure_counter = 0;
  out.pure = canon_pure(out.pure, pure_counter, fresh);
  return out;
}

bool alpha_equal(const PureFormula &a, const PureFormula &b) {
  FreshGen fa(free_vars(a)), fb(free_vars(b));
  std::uint64_t ca = 0, cb = 0;
  return equal(canon_pure(a, ca, fa), canon_pure(b, cb, fb));
}

bool alpha_equal(const SymbolicHeap &a, const SymbolicHeap &b) {
  return equal(canon_heap(a), canon_heap(b));
}

bool alpha_equal(const Entailment &a, const Entailment &b) {
  if (!alpha_equal(a.antecedent, b.antecedent)) return false;
  if (a.succedents.size() != b.succedents.size()) return false;
  for (std::size_t i = 0; i < a.succedents.size(); ++i)
    if (!alpha_equal(a.succedents[i], b.succedents[i])) return false;
  return true;
}

}  // namespace slent
