#pragma once

// Decision procedure for QF entailments with arrays and list segments:
// unroll collapse clears the antecedent lists, then a measured proof search
// over the inference-rule system clears the succedent lists, bottoming out
// in the list-free decider at Start leaves.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slent/context.hpp"
#include "slent/sla.hpp"
#include "slent/syntax.hpp"

namespace slent::slal {

// Antecedent spatial part is always list-free; succedents may carry ls/dll.
struct Judgment {
  SymbolicHeap antecedent;
  std::vector<SymbolicHeap> succedents;
};

enum class RuleId {
  Start,
  UnsatL,
  UnsatR,
  MapsToLsEM,
  MapsToLs,
  LsElim,
  MapsToDllEM,
  MapsToDll,
  DllElim,
  ArrListEM,
  ArrLs,
  ArrDll,
};

const char *rule_name(RuleId r);

struct DerivationTree {
  RuleId rule;
  Judgment conclusion;
  std::vector<DerivationTree> premises;
};

// Lexicographic (lists, unfold, em).  unfold may be negative.
struct Degree {
  std::uint64_t lists = 0;
  std::int64_t unfold = 0;
  std::uint64_t em = 0;

  friend bool operator<(const Degree &a, const Degree &b) {
    if (a.lists != b.lists) return a.lists < b.lists;
    if (a.unfold != b.unfold) return a.unfold < b.unfold;
    return a.em < b.em;
  }
  friend bool operator==(const Degree &a, const Degree &b) {
    return a.lists == b.lists && a.unfold == b.unfold && a.em == b.em;
  }
};

// Per-succedent degrees sorted in decreasing order; compared
// lexicographically, a strict prefix being smaller.
struct Measure {
  std::vector<Degree> degrees;

  friend bool operator<(const Measure &a, const Measure &b) {
    return std::lexicographical_compare(a.degrees.begin(), a.degrees.end(), b.degrees.begin(),
                                        b.degrees.end());
  }
};

// Unroll collapse: 2^(#ls) * 3^(#dll) judgments with list-free antecedents,
// succedents copied unchanged.
std::vector<Judgment> eliminate_antecedent_lists(const Entailment &e, FreshGen &fresh);

// Cell(Sigma, t): t lies in the footprint of a list-free Sigma.
PureFormula cell_formula(const SpatialFormula &sigma, const Term &t);

Degree degree(const SymbolicHeap &psi, const SymbolicHeap &phi, DecisionContext &ctx);
Measure judgment_measure(const Judgment &j, DecisionContext &ctx);
bool measure_less(const Judgment &j1, const Judgment &j2, DecisionContext &ctx);

// Premises of the deterministically chosen rule instance, or nullopt when
// the rule does not apply (shape or side condition).
std::optional<std::vector<Judgment>> apply_rule(RuleId r, const Judgment &j,
                                                DecisionContext &ctx);

std::optional<DerivationTree> search(const Judgment &j, DecisionContext &ctx);

// Independent re-validation of a derivation: every node must reproduce its
// premises from apply_rule, side conditions included.
bool check_derivation(const DerivationTree &t, DecisionContext &ctx);

struct SlalResult {
  sla::Verdict verdict;
  std::vector<Judgment> judgments;
  std::vector<std::optional<DerivationTree>> derivations;  // parallel to judgments
};

SlalResult decide_slal_full(const Entailment &e, DecisionContext &ctx);
sla::Verdict decide_slal(const Entailment &e, DecisionContext &ctx);

std::string render_judgment(const Judgment &j);
std::string render_proof(const DerivationTree &t);
void count_rules(const DerivationTree &t, std::map<RuleId, int> &out);

}  // namespace slent::slal
