#pragma once

// Decision procedure for entailments between symbolic heaps with points-to
// and array atoms: sorted-entailment decomposition over permutations, the
// recursive translation into Presburger arithmetic, elimination of the
// temporary subtraction terms, and the final validity check.

#include <optional>
#include <string>
#include <vector>

#include "slent/context.hpp"
#include "slent/presburger.hpp"
#include "slent/syntax.hpp"

namespace slent::sla {

using presburger::LinearTerm;
using presburger::PbFormula;

enum class VerdictKind { Valid, Invalid, ConditionViolated, ResourceExceeded };

struct Verdict {
  VerdictKind kind;
  std::string reason;  // offending atom / budget message

  bool valid() const { return kind == VerdictKind::Valid; }
};

// t < Sigma: the first address of Sigma is greater than t.
PureFormula precede_constraint(const Term &t, const SpatialFormula &sigma);

// Sorted(Sigma): addresses positive and strictly increasing left to right;
// array atoms additionally well-formed (lo <= hi).
PureFormula sorted_constraint(const SpatialFormula &sigma);

// All |Sigma|! atom orderings, deterministically (lexicographic in the
// original positions).
std::vector<SpatialFormula> permutations(const SpatialFormula &sigma);

// Array sizes in the succedents must not mention that succedent's
// existential binders (checked by coefficient cancellation of hi - lo).
// Returns false and fills `offending` with the bad atom when violated.
bool check_size_condition(const Entailment &e, std::string *offending = nullptr);

// Formulas over two-sided comparisons of linear terms.  Either side may
// carry subtraction (negative coefficients): this is the temporary
// extended-term language of the translation.
class DiffFormula {
public:
  enum class Kind { True, False, Cmp, Not, And, Or, Exists };
  enum class Rel { Eq, Le, Lt };

  DiffFormula();  // True

  static DiffFormula truth();
  static DiffFormula falsity();
  static DiffFormula cmp(Rel r, LinearTerm lhs, LinearTerm rhs);
  static DiffFormula negation(DiffFormula f);
  static DiffFormula conj(std::vector<DiffFormula> fs);
  static DiffFormula disj(std::vector<DiffFormula> fs);
  static DiffFormula implies(DiffFormula a, DiffFormula b);
  static DiffFormula exists(std::string var, DiffFormula body);
  static DiffFormula from_pure(const PureFormula &f);

  Kind kind() const { return node_->kind; }
  Rel rel() const { return node_->rel; }
  const LinearTerm &lhs() const { return node_->lhs; }
  const LinearTerm &rhs() const { return node_->rhs; }
  const std::vector<DiffFormula> &children() const { return node_->children; }
  const std::string &bound_var() const { return node_->var; }

private:
  struct Node {
    Kind kind;
    Rel rel = Rel::Eq;
    LinearTerm lhs, rhs;
    std::vector<DiffFormula> children;
    std::string var;
  };
  explicit DiffFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static DiffFormula make(Node n);
  std::shared_ptr<const Node> node_;
};

struct RightPair {
  PureFormula pure;
  SpatialFormula spatial;  // list-free
};

struct TransProblem {
  PureFormula pure;
  SpatialFormula spatial;  // list-free
  std::vector<RightPair> rights;
  std::vector<std::string> fresh_zs;  // filled by translate_P, generation order
};

// The translation of Fig-1 shape: clauses matched top to bottom, fresh
// variables recorded in p.fresh_zs, subtraction terms left for
// eliminate_differences.
DiffFormula translate_P(TransProblem &p, DecisionContext &ctx);

// Rewrites every two-sided atom into a canonical Presburger atom by moving
// terms across the relation (t' + (u - t) = t'' becomes t' + u = t'' + t).
PbFormula eliminate_differences(const DiffFormula &f);

// A QF list-free symbolic heap is satisfiable iff some permutation of its
// spatial part has a satisfiable sorted strengthening.
bool heap_satisfiable(const SymbolicHeap &h, DecisionContext &ctx);

Verdict decide_sla(const Entailment &e, DecisionContext &ctx);

}  // namespace slent::sla
