#pragma once

// Shared configuration and per-run state for the deciders.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slent/presburger.hpp"

namespace slent {

struct Options {
  unsigned pt = 2;

  // Skip permutations whose sorted strengthening is unsatisfiable (left side)
  // and succedent permutations that can never be satisfied (right side).
  // Sound either way; the verdict is flag-independent.
  bool prune_permutations = true;

  // UnsatR with footprint reasoning.  The pure-parts-only check is not
  // enough to terminate proof search: a succedent can keep absorbing
  // points-to unfoldings whose addresses are only spatially inconsistent.
  bool strong_unsat_r = true;

  // Runtime termination assertions (translation-measure window, proof-search
  // measure decrease).  A violation throws MeasureViolation.
  bool check_measures = true;

  // Record Presburger obligations without deciding them (the
  // smtlib-export-only backend).  Only meaningful on the list-free route.
  bool export_only = false;

  std::size_t node_budget = 1'000'000;
  std::size_t step_budget = 2'000'000;
};

class MeasureViolation : public std::logic_error {
public:
  explicit MeasureViolation(const std::string &what) : std::logic_error(what) {}
};

// One Presburger proof obligation produced by the SLA route; an entailment
// is valid iff every obligation sentence is valid.
struct SmtObligation {
  std::string label;
  presburger::PbFormula sentence;
};

struct DecisionContext {
  Options opts;
  presburger::Solver solver;
  std::function<void(const std::string &)> trace;   // optional
  std::vector<SmtObligation> *obligations = nullptr;  // optional sink

  DecisionContext() : solver(presburger::SolverOptions{Options{}.node_budget}) {}
  explicit DecisionContext(Options o) : opts(o), solver(presburger::SolverOptions{o.node_budget}) {}

  void note(const std::string &msg) {
    if (trace) trace(msg);
  }
};

}  // namespace slent
