#pragma once

// Presburger arithmetic over the natural numbers: canonical linear terms,
// formulas, Cooper-style quantifier elimination, satisfiability/entailment
// entry points for pure formulas, and SMT-LIB2 export.
//
// Semantics: every variable and every quantifier ranges over n >= 0.
// Naturals are enforced by relativization (conjoining x >= 0 when a
// quantifier over x is eliminated; free variables are guarded at closure).

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "slent/syntax.hpp"

namespace slent::presburger {

// Sum of c_i * x_i plus a constant, in canonical form: no zero coefficient
// is stored, so structural equality is semantic equality.
struct LinearTerm {
  std::map<std::string, std::int64_t> coeffs;
  std::int64_t constant = 0;

  static LinearTerm of_const(std::int64_t k);
  static LinearTerm of_var(const std::string &name, std::int64_t coeff = 1);
  static LinearTerm from_term(const Term &t);

  LinearTerm plus(const LinearTerm &o) const;
  LinearTerm minus(const LinearTerm &o) const;
  LinearTerm negated() const;
  LinearTerm scaled(std::int64_t k) const;
  LinearTerm plus_const(std::int64_t k) const;

  std::int64_t coeff(const std::string &name) const;
  LinearTerm without(const std::string &name) const;
  bool is_ground() const { return coeffs.empty(); }
  std::int64_t eval(const std::map<std::string, std::int64_t> &env) const;

  bool operator==(const LinearTerm &o) const {
    return constant == o.constant && coeffs == o.coeffs;
  }
};

class PbFormula {
public:
  // Atom meanings: Eq(lt): lt = 0; Le(lt): lt <= 0; Dvd(d, lt): d | lt.
  // Dvd atoms only arise inside quantifier elimination.
  enum class Kind { True, False, Eq, Le, Dvd, Not, And, Or, Exists, Forall };

  static PbFormula truth();
  static PbFormula falsity();
  static PbFormula boolean(bool b) { return b ? truth() : falsity(); }
  static PbFormula eq(LinearTerm lt);
  static PbFormula le(LinearTerm lt);
  static PbFormula dvd(std::int64_t d, LinearTerm lt);
  static PbFormula negation(PbFormula f);
  static PbFormula conj(std::vector<PbFormula> fs);
  static PbFormula disj(std::vector<PbFormula> fs);
  static PbFormula implies(PbFormula a, PbFormula b);
  static PbFormula exists(std::string var, PbFormula body);
  static PbFormula forall(std::string var, PbFormula body);

  Kind kind() const { return node_->kind; }
  const LinearTerm &linear() const { return node_->lt; }
  std::int64_t divisor() const { return node_->divisor; }
  const std::vector<PbFormula> &children() const { return node_->children; }
  const std::string &bound_var() const { return node_->var; }

  std::size_t node_count() const;
  std::set<std::string> free_vars() const;
  std::string key() const;  // canonical serialization, used for memoization

  // Non-normalizing atom constructors; quantifier elimination needs the
  // +-1 coefficient layout preserved exactly.
  static PbFormula make_atom_eq_raw(LinearTerm lt);
  static PbFormula make_atom_le_raw(LinearTerm lt);
  static PbFormula make_atom_dvd_raw(std::int64_t d, LinearTerm lt);

private:
  struct Node {
    Kind kind;
    LinearTerm lt;
    std::int64_t divisor = 0;
    std::vector<PbFormula> children;
    std::string var;
  };
  explicit PbFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static PbFormula make(Node n);
  std::shared_ptr<const Node> node_;
};

class ResourceLimitError : public std::runtime_error {
public:
  explicit ResourceLimitError(const std::string &what) : std::runtime_error(what) {}
};

// Translation from the surface pure-formula grammar.  Neq/Lt/Le desugar into
// the core atoms (t < u becomes t + 1 - u <= 0).
PbFormula from_pure(const PureFormula &pi);

// SMT-LIB2 script: LIA logic, one Int constant per free variable with a
// nonnegativity assert, quantifiers guarded the same way, then the formula
// itself and (check-sat).  Checking the negation decides validity.
std::string to_smtlib(const PbFormula &f);

// The bare formula as an s-expression (diagnostics, proof output).
std::string to_string(const PbFormula &f);

// Quantifier-free evaluation; throws on quantifiers.
bool eval_qf(const PbFormula &f, const std::map<std::string, std::int64_t> &env);

struct SolverOptions {
  std::size_t node_budget = 1'000'000;
};

// Decision procedure with per-instance memoization.  Pure function of its
// inputs; distinct instances are fully independent, one instance must be
// externally synchronized if shared across threads.
class Solver {
public:
  Solver() = default;
  explicit Solver(SolverOptions opts) : opts_(opts) {}

  // Equivalent quantifier-free formula over naturals.
  PbFormula qe(const PbFormula &f);

  // Truth of a closed formula.
  bool decide(const PbFormula &f);

  // Exists-closure of pi holds over naturals.
  bool is_satisfiable(const PureFormula &pi);

  // Forall-closure of pi -> gamma holds over naturals.
  bool pure_entails(const PureFormula &pi, const PureFormula &gamma);

  std::size_t decide_calls() const { return decide_calls_; }

private:
  PbFormula qe_rec(const PbFormula &f);
  PbFormula eliminate_exists(const std::string &var, const PbFormula &qf);
  void check_budget(std::size_t nodes);

  SolverOptions opts_;
  std::unordered_map<std::string, bool> decide_cache_;
  std::size_t decide_calls_ = 0;
};

}  // namespace slent::presburger
