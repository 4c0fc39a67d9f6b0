#pragma once

// Abstract syntax for terms, pure formulas, spatial formulas, symbolic heaps
// and entailments, together with the basic syntactic operations (free
// variables, substitution, alpha-equivalence, term collection).
//
// All values are immutable after construction and may be freely shared
// across threads.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace slent {

// Terms: variables, natural-number constants and sums.  No other operator
// is representable; sizes and addresses stay inside this grammar.
class Term {
public:
  enum class Kind { Var, Const, Sum };

  static Term var(std::string name);
  static Term nat(std::uint64_t value);
  static Term sum(Term lhs, Term rhs);

  Kind kind() const { return node_->kind; }
  const std::string &var_name() const { return node_->name; }
  std::uint64_t const_value() const { return node_->value; }
  const Term &lhs() const { return node_->args[0]; }
  const Term &rhs() const { return node_->args[1]; }

  bool operator==(const Term &other) const { return compare(*this, other) == 0; }
  bool operator!=(const Term &other) const { return !(*this == other); }
  bool operator<(const Term &other) const { return compare(*this, other) < 0; }

  static int compare(const Term &a, const Term &b);

private:
  struct Node {
    Kind kind;
    std::string name;
    std::uint64_t value = 0;
    std::vector<Term> args;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Pure formulas.  The surface DSL only produces conjunctions of
// (in)equalities, but the full grammar is available internally; Neq and Lt
// are kept as first-class nodes and desugared when exported to the
// arithmetic backend.
class PureFormula {
public:
  enum class Kind { True, False, Eq, Neq, Le, Lt, And, Or, Not, Exists };

  PureFormula();  // True

  static PureFormula truth();
  static PureFormula falsity();
  static PureFormula eq(Term l, Term r);
  static PureFormula neq(Term l, Term r);
  static PureFormula le(Term l, Term r);
  static PureFormula lt(Term l, Term r);
  static PureFormula conj(std::vector<PureFormula> fs);   // flattens; True unit
  static PureFormula disj(std::vector<PureFormula> fs);   // flattens; False unit
  static PureFormula negation(PureFormula f);
  static PureFormula exists(std::string var, PureFormula body);
  static PureFormula atom(Kind k, Term l, Term r);

  Kind kind() const { return node_->kind; }
  const Term &lhs() const { return node_->lhs[0]; }
  const Term &rhs() const { return node_->lhs[1]; }
  const std::vector<PureFormula> &children() const { return node_->children; }
  const std::string &bound_var() const { return node_->var; }
  bool is_atom() const;

private:
  struct Node {
    Kind kind;
    std::vector<Term> lhs;  // two terms for atoms
    std::vector<PureFormula> children;
    std::string var;
  };
  explicit PureFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Spatial atoms.  PointsTo carries the address followed by pt value slots;
// the arity is fixed at parse time and consistent within one entailment.
struct SpatialAtom {
  enum class Kind { Emp, PointsTo, Arr, Ls, Dll };

  Kind kind;
  std::vector<Term> args;

  static SpatialAtom emp() { return {Kind::Emp, {}}; }
  static SpatialAtom points_to(Term addr, std::vector<Term> values);
  static SpatialAtom arr(Term lo, Term hi) { return {Kind::Arr, {std::move(lo), std::move(hi)}}; }
  static SpatialAtom ls(Term from, Term to) { return {Kind::Ls, {std::move(from), std::move(to)}}; }
  static SpatialAtom dll(Term a, Term b, Term c, Term d) {
    return {Kind::Dll, {std::move(a), std::move(b), std::move(c), std::move(d)}};
  }

  const Term &addr() const { return args[0]; }
  // PointsTo value slots (everything after the address).
  std::vector<Term> values() const { return {args.begin() + 1, args.end()}; }

  bool operator==(const SpatialAtom &other) const;
};

// The atom order is significant: sortedness and the translation to
// arithmetic read the sequence left to right.  The empty sequence is Emp.
using SpatialFormula = std::vector<SpatialAtom>;

struct SymbolicHeap {
  std::vector<std::string> bound_vars;  // pairwise distinct
  PureFormula pure = PureFormula::truth();
  SpatialFormula spatial;

  bool is_qf() const { return bound_vars.empty(); }
};

struct Entailment {
  SymbolicHeap antecedent;
  std::vector<SymbolicHeap> succedents;  // index order fixed at parse time
};

// ---------------------------------------------------------------------------
// Free variables

std::set<std::string> free_vars(const Term &t);
std::set<std::string> free_vars(const PureFormula &f);
std::set<std::string> free_vars(const SpatialAtom &a);
std::set<std::string> free_vars(const SpatialFormula &s);
std::set<std::string> free_vars(const SymbolicHeap &h);
std::set<std::string> free_vars(const Entailment &e);

// ---------------------------------------------------------------------------
// Substitution (simultaneous, capture-avoiding)

using TermSubst = std::map<std::string, Term>;

// Fresh-name source.  Generated names contain '#', which the DSL cannot
// parse, so they can never collide with user input.
class FreshGen {
public:
  FreshGen() = default;
  explicit FreshGen(std::set<std::string> avoid) : avoid_(std::move(avoid)) {}
  std::string fresh(const std::string &base);
  void avoid(const std::set<std::string> &names);

private:
  std::set<std::string> avoid_;
  std::uint64_t counter_ = 0;
};

Term substitute(const Term &t, const TermSubst &subst);
PureFormula substitute(const PureFormula &f, const TermSubst &subst, FreshGen &fresh);
SpatialAtom substitute(const SpatialAtom &a, const TermSubst &subst);
SpatialFormula substitute(const SpatialFormula &s, const TermSubst &subst);
SymbolicHeap substitute(const SymbolicHeap &h, const TermSubst &subst, FreshGen &fresh);

// ---------------------------------------------------------------------------
// Syntactic queries

// Tm(Sigma): every term occurring in the atoms, including list arguments.
std::set<Term> spatial_terms(const SpatialFormula &s);

bool is_list_free(const SpatialAtom &a);
bool is_list_free(const SpatialFormula &s);
bool is_list_free(const SymbolicHeap &h);
bool is_list_free(const Entailment &e);

std::size_t count_points_to(const SpatialFormula &s);
std::size_t count_lists(const SpatialFormula &s);

// Alpha-equivalence (bound variables renamed canonically).
bool alpha_equal(const PureFormula &a, const PureFormula &b);
bool alpha_equal(const SymbolicHeap &a, const SymbolicHeap &b);
bool alpha_equal(const Entailment &a, const Entailment &b);

// Structural equality helpers.
bool equal(const PureFormula &a, const PureFormula &b);
bool equal(const SymbolicHeap &a, const SymbolicHeap &b);

}  // namespace slent
