#include "slent/slal.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

#include "slent/printer.hpp"

namespace slent::slal {

const char *rule_name(RuleId r) {
  switch (r) {
    case RuleId::Start: return "Start";
    case RuleId::UnsatL: return "UnsatL";
    case RuleId::UnsatR: return "UnsatR";
    case RuleId::MapsToLsEM: return "MapsToLsEM";
    case RuleId::MapsToLs: return "MapsToLs";
    case RuleId::LsElim: return "LsElim";
    case RuleId::MapsToDllEM: return "MapsToDllEM";
    case RuleId::MapsToDll: return "MapsToDll";
    case RuleId::DllElim: return "DllElim";
    case RuleId::ArrListEM: return "ArrListEM";
    case RuleId::ArrLs: return "ArrLs";
    case RuleId::ArrDll: return "ArrDll";
  }
  return "?";
}

std::string render_judgment(const Judgment &j) {
  Entailment e{j.antecedent, j.succedents};
  return render(e);
}

// ---------------------------------------------------------------------------
// Unroll collapse

std::vector<Judgment> eliminate_antecedent_lists(const Entailment &e, FreshGen &fresh) {
  std::vector<Judgment> out;

  std::function<void(const SymbolicHeap &)> expand = [&](const SymbolicHeap &h) {
    std::size_t k = 0;
    while (k < h.spatial.size() && is_list_free(h.spatial[k])) ++k;
    if (k == h.spatial.size()) {
      out.push_back({h, e.succedents});
      return;
    }
    const SpatialAtom &a = h.spatial[k];
    if (a.kind == SpatialAtom::Kind::Ls) {
      Term t = a.args[0], u = a.args[1];
      // Empty segment.
      SymbolicHeap h1 = h;
      h1.spatial.erase(h1.spatial.begin() + k);
      h1.pure = PureFormula::conj({h1.pure, PureFormula::eq(t, u)});
      expand(h1);
      // Two-cell segment with fresh middle and payloads.
      Term z = Term::var(fresh.fresh("z"));
      Term y1 = Term::var(fresh.fresh("y"));
      Term y2 = Term::var(fresh.fresh("y"));
      SymbolicHeap h2 = h;
      h2.spatial.erase(h2.spatial.begin() + k);
      h2.spatial.insert(h2.spatial.begin() + k, SpatialAtom::points_to(z, {u, y2}));
      h2.spatial.insert(h2.spatial.begin() + k, SpatialAtom::points_to(t, {z, y1}));
      expand(h2);
    } else {
      Term t = a.args[0], u = a.args[1], v = a.args[2], w = a.args[3];
      // Empty segment.
      SymbolicHeap h1 = h;
      h1.spatial.erase(h1.spatial.begin() + k);
      h1.pure = PureFormula::conj({h1.pure, PureFormula::eq(t, u), PureFormula::eq(v, w)});
      expand(h1);
      // Single cell.
      SymbolicHeap h2 = h;
      h2.spatial[k] = SpatialAtom::points_to(t, {u, w});
      h2.pure = PureFormula::conj({h2.pure, PureFormula::eq(t, v)});
      expand(h2);
      // Three cells with a fresh middle.
      Term z = Term::var(fresh.fresh("z"));
      SymbolicHeap h3 = h;
      h3.spatial.erase(h3.spatial.begin() + k);
      h3.spatial.insert(h3.spatial.begin() + k, SpatialAtom::points_to(v, {u, z}));
      h3.spatial.insert(h3.spatial.begin() + k, SpatialAtom::points_to(z, {v, t}));
      h3.spatial.insert(h3.spatial.begin() + k, SpatialAtom::points_to(t, {z, w}));
      expand(h3);
    }
  };
  expand(e.antecedent);
  return out;
}

// ---------------------------------------------------------------------------
// Cell formula

PureFormula cell_formula(const SpatialFormula &sigma, const Term &t) {
  std::vector<PureFormula> cases;
  for (const auto &a : sigma) {
    switch (a.kind) {
      case SpatialAtom::Kind::Emp:
        break;
      case SpatialAtom::Kind::PointsTo:
        cases.push_back(PureFormula::eq(t, a.args[0]));
        break;
      case SpatialAtom::Kind::Arr:
        cases.push_back(
            PureFormula::conj({PureFormula::le(a.args[0], t), PureFormula::le(t, a.args[1])}));
        break;
      default:
        throw std::invalid_argument("cell_formula: list atom");
    }
  }
  return PureFormula::disj(std::move(cases));
}

// ---------------------------------------------------------------------------
// Degrees and measures

namespace {

bool is_ls(const SpatialAtom &a) { return a.kind == SpatialAtom::Kind::Ls; }
bool is_dll(const SpatialAtom &a) { return a.kind == SpatialAtom::Kind::Dll; }
bool is_list(const SpatialAtom &a) { return is_ls(a) || is_dll(a); }

bool em_conditions(const PureFormula &pi, const SpatialAtom &sigma, const Term &head,
                   DecisionContext &ctx) {
  if (sigma.kind == SpatialAtom::Kind::PointsTo) {
    const Term &t = sigma.args[0];
    return ctx.solver.is_satisfiable(PureFormula::conj({PureFormula::eq(t, head), pi})) &&
           ctx.solver.is_satisfiable(PureFormula::conj({PureFormula::neq(t, head), pi}));
  }
  if (sigma.kind == SpatialAtom::Kind::Arr) {
    const Term &t = sigma.args[0], &v = sigma.args[1];
    PureFormula inside =
        PureFormula::conj({PureFormula::le(t, head), PureFormula::le(head, v)});
    PureFormula outside =
        PureFormula::disj({PureFormula::lt(head, t), PureFormula::lt(v, head)});
    return ctx.solver.is_satisfiable(PureFormula::conj({inside, pi})) &&
           ctx.solver.is_satisfiable(PureFormula::conj({outside, pi}));
  }
  return false;
}

}  // namespace

Degree degree(const SymbolicHeap &psi, const SymbolicHeap &phi, DecisionContext &ctx) {
  Degree d;
  d.lists = count_lists(psi.spatial);
  d.unfold = static_cast<std::int64_t>(count_points_to(phi.spatial)) -
             static_cast<std::int64_t>(count_points_to(psi.spatial));
  for (const auto &sigma : phi.spatial) {
    for (const auto &sp : psi.spatial) {
      if (!is_list(sp)) continue;
      if (em_conditions(phi.pure, sigma, sp.args[0], ctx)) ++d.em;
    }
  }
  return d;
}

Measure judgment_measure(const Judgment &j, DecisionContext &ctx) {
  Measure m;
  for (const auto &s : j.succedents) m.degrees.push_back(degree(s, j.antecedent, ctx));
  std::sort(m.degrees.begin(), m.degrees.end(),
            [](const Degree &a, const Degree &b) { return b < a; });
  return m;
}

bool measure_less(const Judgment &j1, const Judgment &j2, DecisionContext &ctx) {
  return judgment_measure(j1, ctx) < judgment_measure(j2, ctx);
}

// ---------------------------------------------------------------------------
// UnsatR compatibility check

namespace {

// Sound unsatisfiability test for the classical conjunction of the
// judgment's antecedent with one succedent: both constrain the same heap.
// The pure parts are combined with footprint requirements: determined
// succedent cells lie inside the antecedent footprint, are mutually
// disjoint, and points-to values agree where addresses coincide; for a
// list-free succedent the footprints must match exactly.
bool conjunction_unsat(const SymbolicHeap &phi, const SymbolicHeap &psi, DecisionContext &ctx) {
  std::vector<PureFormula> cs{phi.pure, psi.pure};
  if (!ctx.opts.strong_unsat_r)
    return !ctx.solver.is_satisfiable(PureFormula::conj(std::move(cs)));

  std::vector<const SpatialAtom *> pts, arrs;
  for (const auto &a : psi.spatial) {
    if (a.kind == SpatialAtom::Kind::PointsTo) pts.push_back(&a);
    if (a.kind == SpatialAtom::Kind::Arr) arrs.push_back(&a);
  }

  // Well-formedness and membership of determined succedent cells.
  for (const auto *p : pts) cs.push_back(cell_formula(phi.spatial, p->args[0]));
  for (const auto *a : arrs) {
    cs.push_back(PureFormula::le(a->args[0], a->args[1]));
    cs.push_back(cell_formula(phi.spatial, a->args[0]));
    cs.push_back(cell_formula(phi.spatial, a->args[1]));
  }
  // Mutual disjointness of the succedent's determined footprints.
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      cs.push_back(PureFormula::neq(pts[i]->args[0], pts[j]->args[0]));
  for (const auto *p : pts)
    for (const auto *a : arrs)
      cs.push_back(PureFormula::disj({PureFormula::lt(p->args[0], a->args[0]),
                                      PureFormula::lt(a->args[1], p->args[0])}));
  for (std::size_t i = 0; i < arrs.size(); ++i)
    for (std::size_t j = i + 1; j < arrs.size(); ++j)
      cs.push_back(PureFormula::disj({PureFormula::lt(arrs[i]->args[1], arrs[j]->args[0]),
                                      PureFormula::lt(arrs[j]->args[1], arrs[i]->args[0])}));
  // Value agreement between points-to atoms at provably equal addresses.
  for (const auto &pa : phi.spatial) {
    if (pa.kind != SpatialAtom::Kind::PointsTo) continue;
    for (const auto *p : pts) {
      if (pa.args.size() != p->args.size()) continue;
      std::vector<PureFormula> eqs;
      for (std::size_t k = 1; k < pa.args.size(); ++k)
        eqs.push_back(PureFormula::eq(pa.args[k], p->args[k]));
      cs.push_back(PureFormula::disj(
          {PureFormula::neq(pa.args[0], p->args[0]), PureFormula::conj(std::move(eqs))}));
    }
  }
  // List-free succedents must cover the antecedent footprint exactly.
  if (is_list_free(psi.spatial)) {
    std::set<std::string> avoid = free_vars(phi);
    auto fv = free_vars(psi);
    avoid.insert(fv.begin(), fv.end());
    FreshGen fg(avoid);
    std::string x = fg.fresh("cell");
    Term xt = Term::var(x);
    PureFormula gap = PureFormula::exists(
        x, PureFormula::conj({cell_formula(phi.spatial, xt),
                              PureFormula::negation(cell_formula(psi.spatial, xt))}));
    cs.push_back(PureFormula::negation(gap));
  }
  return !ctx.solver.is_satisfiable(PureFormula::conj(std::move(cs)));
}

PureFormula with_pure(const PureFormula &pi, std::vector<PureFormula> extra) {
  extra.insert(extra.begin(), pi);
  return PureFormula::conj(std::move(extra));
}

SymbolicHeap add_pure(const SymbolicHeap &h, std::vector<PureFormula> extra) {
  SymbolicHeap out = h;
  out.pure = with_pure(h.pure, std::move(extra));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rules

std::optional<std::vector<Judgment>> apply_rule(RuleId r, const Judgment &j,
                                                DecisionContext &ctx) {
  const SymbolicHeap &phi = j.antecedent;
  const PureFormula &pi = phi.pure;

  switch (r) {
    case RuleId::Start: {
      for (const auto &s : j.succedents)
        if (!is_list_free(s)) return std::nullopt;
      Entailment e{j.antecedent, j.succedents};
      sla::Verdict v = sla::decide_sla(e, ctx);
      if (v.kind == sla::VerdictKind::ResourceExceeded)
        throw presburger::ResourceLimitError(v.reason);
      if (v.kind == sla::VerdictKind::Valid) return std::vector<Judgment>{};
      return std::nullopt;
    }

    case RuleId::UnsatL: {
      if (!sla::heap_satisfiable(phi, ctx)) return std::vector<Judgment>{};
      return std::nullopt;
    }

    case RuleId::UnsatR: {
      for (std::size_t k = 0; k < j.succedents.size(); ++k) {
        if (conjunction_unsat(phi, j.succedents[k], ctx)) {
          Judgment p = j;
          p.succedents.erase(p.succedents.begin() + k);
          return std::vector<Judgment>{std::move(p)};
        }
      }
      return std::nullopt;
    }

    case RuleId::MapsToLsEM:
    case RuleId::MapsToDllEM: {
      bool want_ls = r == RuleId::MapsToLsEM;
      for (const auto &sigma : phi.spatial) {
        if (sigma.kind != SpatialAtom::Kind::PointsTo) continue;
        const Term &t = sigma.args[0];
        for (const auto &succ : j.succedents) {
          for (const auto &a : succ.spatial) {
            if (want_ls ? !is_ls(a) : !is_dll(a)) continue;
            const Term &tp = a.args[0];
            if (ctx.solver.is_satisfiable(with_pure(pi, {PureFormula::eq(t, tp)})) &&
                ctx.solver.is_satisfiable(with_pure(pi, {PureFormula::neq(t, tp)}))) {
              Judgment p1 = j, p2 = j;
              p1.antecedent = add_pure(phi, {PureFormula::eq(t, tp)});
              p2.antecedent = add_pure(phi, {PureFormula::neq(t, tp)});
              return std::vector<Judgment>{std::move(p1), std::move(p2)};
            }
          }
        }
      }
      return std::nullopt;
    }

    case RuleId::MapsToLs: {
      for (const auto &sigma : phi.spatial) {
        if (sigma.kind != SpatialAtom::Kind::PointsTo) continue;
        const Term &t = sigma.args[0];
        const Term v = sigma.args[1], w = sigma.args[2];
        for (std::size_t k = 0; k < j.succedents.size(); ++k) {
          const SymbolicHeap &succ = j.succedents[k];
          for (std::size_t ai = 0; ai < succ.spatial.size(); ++ai) {
            const SpatialAtom &a = succ.spatial[ai];
            if (!is_ls(a)) continue;
            const Term tp = a.args[0], up = a.args[1];
            if (!ctx.solver.pure_entails(pi, PureFormula::eq(t, tp))) continue;
            SymbolicHeap d1 = succ;
            d1.spatial.erase(d1.spatial.begin() + ai);
            d1.pure = with_pure(d1.pure, {PureFormula::eq(tp, up)});
            SymbolicHeap d2 = succ;
            d2.spatial.erase(d2.spatial.begin() + ai);
            d2.spatial.insert(d2.spatial.begin() + ai, SpatialAtom::ls(v, up));
            d2.spatial.insert(d2.spatial.begin() + ai, SpatialAtom::points_to(tp, {v, w}));
            Judgment p = j;
            p.succedents.erase(p.succedents.begin() + k);
            p.succedents.insert(p.succedents.begin() + k, std::move(d2));
            p.succedents.insert(p.succedents.begin() + k, std::move(d1));
            return std::vector<Judgment>{std::move(p)};
          }
        }
      }
      return std::nullopt;
    }

    case RuleId::MapsToDll: {
      for (const auto &sigma : phi.spatial) {
        if (sigma.kind != SpatialAtom::Kind::PointsTo) continue;
        const Term &t = sigma.args[0];
        const Term v = sigma.args[1];
        for (std::size_t k = 0; k < j.succedents.size(); ++k) {
          const SymbolicHeap &succ = j.succedents[k];
          for (std::size_t ai = 0; ai < succ.spatial.size(); ++ai) {
            const SpatialAtom &a = succ.spatial[ai];
            if (!is_dll(a)) continue;
            const Term tp = a.args[0], up = a.args[1], vp = a.args[2], wp = a.args[3];
            if (!ctx.solver.pure_entails(pi, PureFormula::eq(t, tp))) continue;
            SymbolicHeap d1 = succ;
            d1.spatial.erase(d1.spatial.begin() + ai);
            d1.pure = with_pure(d1.pure, {PureFormula::eq(tp, up), PureFormula::eq(vp, wp)});
            SymbolicHeap d2 = succ;
            d2.spatial.erase(d2.spatial.begin() + ai);
            d2.spatial.insert(d2.spatial.begin() + ai, SpatialAtom::dll(v, up, vp, tp));
            d2.spatial.insert(d2.spatial.begin() + ai, SpatialAtom::points_to(t, {v, wp}));
            Judgment p = j;
            p.succedents.erase(p.succedents.begin() + k);
            p.succedents.insert(p.succedents.begin() + k, std::move(d2));
            p.succedents.insert(p.succedents.begin() + k, std::move(d1));
            return std::vector<Judgment>{std::move(p)};
          }
        }
      }
      return std::nullopt;
    }

    case RuleId::LsElim:
    case RuleId::DllElim: {
      bool want_ls = r == RuleId::LsElim;
      for (std::size_t k = 0; k < j.succedents.size(); ++k) {
        const SymbolicHeap &succ = j.succedents[k];
        for (std::size_t ai = 0; ai < succ.spatial.size(); ++ai) {
          const SpatialAtom &a = succ.spatial[ai];
          if (want_ls ? !is_ls(a) : !is_dll(a)) continue;
          const Term &tp = a.args[0];
          if (ctx.solver.pure_entails(pi, cell_formula(phi.spatial, tp))) continue;
          SymbolicHeap d = succ;
          d.spatial.erase(d.spatial.begin() + ai);
          if (want_ls) {
            d.pure = with_pure(d.pure, {PureFormula::eq(a.args[0], a.args[1])});
          } else {
            d.pure = with_pure(d.pure, {PureFormula::eq(a.args[0], a.args[1]),
                                        PureFormula::eq(a.args[2], a.args[3])});
          }
          Judgment p = j;
          p.succedents[k] = std::move(d);
          return std::vector<Judgment>{std::move(p)};
        }
      }
      return std::nullopt;
    }

    case RuleId::ArrListEM: {
      for (const auto &sigma : phi.spatial) {
        if (sigma.kind != SpatialAtom::Kind::Arr) continue;
        const Term &t = sigma.args[0], &v = sigma.args[1];
        for (const auto &succ : j.succedents) {
          for (const auto &a : succ.spatial) {
            if (!is_list(a)) continue;
            const Term &tp = a.args[0];
            PureFormula inside =
                PureFormula::conj({PureFormula::le(t, tp), PureFormula::le(tp, v)});
            PureFormula outside =
                PureFormula::disj({PureFormula::lt(tp, t), PureFormula::lt(v, tp)});
            if (ctx.solver.is_satisfiable(with_pure(pi, {inside})) &&
                ctx.solver.is_satisfiable(with_pure(pi, {outside}))) {
              Judgment p1 = j, p2 = j, p3 = j;
              p1.antecedent = add_pure(phi, {inside});
              p2.antecedent = add_pure(phi, {PureFormula::lt(v, tp)});
              p3.antecedent = add_pure(phi, {PureFormula::lt(tp, t)});
              return std::vector<Judgment>{std::move(p1), std::move(p2), std::move(p3)};
            }
          }
        }
      }
      return std::nullopt;
    }

    case RuleId::ArrLs:
    case RuleId::ArrDll: {
      bool want_ls = r == RuleId::ArrLs;
      for (const auto &sigma : phi.spatial) {
        if (sigma.kind != SpatialAtom::Kind::Arr) continue;
        const Term &t = sigma.args[0], &v = sigma.args[1];
        for (std::size_t k = 0; k < j.succedents.size(); ++k) {
          const SymbolicHeap &succ = j.succedents[k];
          for (std::size_t ai = 0; ai < succ.spatial.size(); ++ai) {
            const SpatialAtom &a = succ.spatial[ai];
            if (want_ls ? !is_ls(a) : !is_dll(a)) continue;
            const Term &tp = a.args[0];
            PureFormula inside =
                PureFormula::conj({PureFormula::le(t, tp), PureFormula::le(tp, v)});
            if (!ctx.solver.pure_entails(pi, inside)) continue;
            SymbolicHeap d = succ;
            d.spatial.erase(d.spatial.begin() + ai);
            if (want_ls) {
              d.pure = with_pure(d.pure, {PureFormula::eq(a.args[0], a.args[1])});
            } else {
              d.pure = with_pure(d.pure, {PureFormula::eq(a.args[0], a.args[1]),
                                          PureFormula::eq(a.args[2], a.args[3])});
            }
            Judgment p = j;
            p.succedents[k] = std::move(d);
            return std::vector<Judgment>{std::move(p)};
          }
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Search

namespace {

constexpr RuleId kPriority[] = {
    RuleId::UnsatL,      RuleId::Start,   RuleId::UnsatR, RuleId::MapsToLsEM,
    RuleId::ArrListEM,   RuleId::LsElim,  RuleId::ArrLs,  RuleId::MapsToLs,
    RuleId::MapsToDllEM, RuleId::DllElim, RuleId::ArrDll, RuleId::MapsToDll,
};

}  // namespace

std::optional<DerivationTree> search(const Judgment &j, DecisionContext &ctx) {
  for (RuleId r : kPriority) {
    auto premises = apply_rule(r, j, ctx);
    if (!premises) continue;
    ctx.note("slal: " + std::string(rule_name(r)) + " on " + render_judgment(j));
    if (ctx.opts.check_measures && r != RuleId::Start && r != RuleId::UnsatL) {
      for (const auto &p : *premises)
        if (!measure_less(p, j, ctx))
          throw MeasureViolation(std::string("premise measure not smaller under ") +
                                 rule_name(r));
    }
    DerivationTree tree{r, j, {}};
    for (const auto &p : *premises) {
      auto sub = search(p, ctx);
      if (!sub) return std::nullopt;
      tree.premises.push_back(std::move(*sub));
    }
    return tree;
  }
  return std::nullopt;
}

bool check_derivation(const DerivationTree &t, DecisionContext &ctx) {
  auto premises = apply_rule(t.rule, t.conclusion, ctx);
  if (!premises) return false;
  if (premises->size() != t.premises.size()) return false;
  for (std::size_t i = 0; i < premises->size(); ++i) {
    const Judgment &expect = (*premises)[i];
    const Judgment &got = t.premises[i].conclusion;
    if (!alpha_equal(expect.antecedent, got.antecedent)) return false;
    if (expect.succedents.size() != got.succedents.size()) return false;
    for (std::size_t k = 0; k < expect.succedents.size(); ++k)
      if (!alpha_equal(expect.succedents[k], got.succedents[k])) return false;
    if (!check_derivation(t.premises[i], ctx)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Top level

SlalResult decide_slal_full(const Entailment &e, DecisionContext &ctx) {
  if (!e.antecedent.is_qf())
    throw std::invalid_argument("decide_slal: antecedent must be quantifier-free");
  for (const auto &s : e.succedents)
    if (!s.is_qf())
      throw std::invalid_argument("decide_slal: succedents must be quantifier-free");

  SlalResult res;
  try {
    FreshGen fresh(free_vars(e));
    res.judgments = eliminate_antecedent_lists(e, fresh);
    bool all = true;
    for (const auto &j : res.judgments) {
      auto tree = search(j, ctx);
      if (!tree) {
        all = false;
        res.derivations.push_back(std::nullopt);
        ctx.note("slal: no derivation for " + render_judgment(j));
      } else {
        res.derivations.push_back(std::move(tree));
      }
    }
    res.verdict = all ? sla::Verdict{sla::VerdictKind::Valid, {}}
                      : sla::Verdict{sla::VerdictKind::Invalid, {}};
  } catch (const presburger::ResourceLimitError &err) {
    res.verdict = {sla::VerdictKind::ResourceExceeded, err.what()};
  }
  return res;
}

sla::Verdict decide_slal(const Entailment &e, DecisionContext &ctx) {
  return decide_slal_full(e, ctx).verdict;
}

static void render_proof_rec(const DerivationTree &t, std::string &out, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += rule_name(t.rule);
  out += ": ";
  out += render_judgment(t.conclusion);
  out += "\n";
  for (const auto &p : t.premises) render_proof_rec(p, out, depth + 1);
}

std::string render_proof(const DerivationTree &t) {
  std::string out;
  render_proof_rec(t, out, 0);
  return out;
}

void count_rules(const DerivationTree &t, std::map<RuleId, int> &out) {
  ++out[t.rule];
  for (const auto &p : t.premises) count_rules(p, out);
}

}  // namespace slent::slal
