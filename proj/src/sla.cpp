#include "slent/sla.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "slent/printer.hpp"

namespace slent::sla {

// ---------------------------------------------------------------------------
// DiffFormula

DiffFormula DiffFormula::make(Node n) { return DiffFormula(std::make_shared<Node>(std::move(n))); }

DiffFormula::DiffFormula() : DiffFormula(truth()) {}

DiffFormula DiffFormula::truth() { return make({Kind::True}); }
DiffFormula DiffFormula::falsity() { return make({Kind::False}); }

DiffFormula DiffFormula::cmp(Rel r, LinearTerm lhs, LinearTerm rhs) {
  Node n{Kind::Cmp};
  n.rel = r;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return make(std::move(n));
}

DiffFormula DiffFormula::negation(DiffFormula f) {
  if (f.kind() == Kind::True) return falsity();
  if (f.kind() == Kind::False) return truth();
  Node n{Kind::Not};
  n.children = {std::move(f)};
  return make(std::move(n));
}

DiffFormula DiffFormula::conj(std::vector<DiffFormula> fs) {
  std::vector<DiffFormula> kids;
  for (auto &f : fs) {
    if (f.kind() == Kind::True) continue;
    if (f.kind() == Kind::False) return falsity();
    if (f.kind() == Kind::And)
      for (const auto &k : f.children()) kids.push_back(k);
    else
      kids.push_back(std::move(f));
  }
  if (kids.empty()) return truth();
  if (kids.size() == 1) return kids[0];
  Node n{Kind::And};
  n.children = std::move(kids);
  return make(std::move(n));
}

DiffFormula DiffFormula::disj(std::vector<DiffFormula> fs) {
  std::vector<DiffFormula> kids;
  for (auto &f : fs) {
    if (f.kind() == Kind::False) continue;
    if (f.kind() == Kind::True) return truth();
    if (f.kind() == Kind::Or)
      for (const auto &k : f.children()) kids.push_back(k);
    else
      kids.push_back(std::move(f));
  }
  if (kids.empty()) return falsity();
  if (kids.size() == 1) return kids[0];
  Node n{Kind::Or};
  n.children = std::move(kids);
  return make(std::move(n));
}

DiffFormula DiffFormula::implies(DiffFormula a, DiffFormula b) {
  return disj({negation(std::move(a)), std::move(b)});
}

DiffFormula DiffFormula::exists(std::string var, DiffFormula body) {
  Node n{Kind::Exists};
  n.var = std::move(var);
  n.children = {std::move(body)};
  return make(std::move(n));
}

DiffFormula DiffFormula::from_pure(const PureFormula &f) {
  using K = PureFormula::Kind;
  auto lin = [](const Term &t) { return LinearTerm::from_term(t); };
  switch (f.kind()) {
    case K::True:
      return truth();
    case K::False:
      return falsity();
    case K::Eq:
      return cmp(Rel::Eq, lin(f.lhs()), lin(f.rhs()));
    case K::Neq:
      return negation(cmp(Rel::Eq, lin(f.lhs()), lin(f.rhs())));
    case K::Le:
      return cmp(Rel::Le, lin(f.lhs()), lin(f.rhs()));
    case K::Lt:
      return cmp(Rel::Lt, lin(f.lhs()), lin(f.rhs()));
    case K::And: {
      std::vector<DiffFormula> kids;
      for (const auto &k : f.children()) kids.push_back(from_pure(k));
      return conj(std::move(kids));
    }
    case K::Or: {
      std::vector<DiffFormula> kids;
      for (const auto &k : f.children()) kids.push_back(from_pure(k));
      return disj(std::move(kids));
    }
    case K::Not:
      return negation(from_pure(f.children()[0]));
    case K::Exists:
      return exists(f.bound_var(), from_pure(f.children()[0]));
  }
  return truth();
}

PbFormula eliminate_differences(const DiffFormula &f) {
  using K = DiffFormula::Kind;
  switch (f.kind()) {
    case K::True:
      return PbFormula::truth();
    case K::False:
      return PbFormula::falsity();
    case K::Cmp: {
      LinearTerm lt = f.lhs().minus(f.rhs());
      switch (f.rel()) {
        case DiffFormula::Rel::Eq:
          return PbFormula::eq(std::move(lt));
        case DiffFormula::Rel::Le:
          return PbFormula::le(std::move(lt));
        case DiffFormula::Rel::Lt:
          return PbFormula::le(lt.plus_const(1));
      }
      return PbFormula::truth();
    }
    case K::Not:
      return PbFormula::negation(eliminate_differences(f.children()[0]));
    case K::And:
    case K::Or: {
      std::vector<PbFormula> kids;
      kids.reserve(f.children().size());
      for (const auto &k : f.children()) kids.push_back(eliminate_differences(k));
      return f.kind() == K::And ? PbFormula::conj(std::move(kids))
                                : PbFormula::disj(std::move(kids));
    }
    case K::Exists:
      return PbFormula::exists(f.bound_var(), eliminate_differences(f.children()[0]));
  }
  return PbFormula::truth();
}

// ---------------------------------------------------------------------------
// Sortedness (surface level)

PureFormula precede_constraint(const Term &t, const SpatialFormula &sigma) {
  for (const auto &a : sigma) {
    if (a.kind == SpatialAtom::Kind::Emp) continue;
    return PureFormula::lt(t, a.args[0]);
  }
  return PureFormula::truth();
}

static PureFormula sorted_prime(const SpatialFormula &sigma, std::size_t from) {
  if (from >= sigma.size()) return PureFormula::truth();
  const SpatialAtom &a = sigma[from];
  SpatialFormula tail(sigma.begin() + from + 1, sigma.end());
  switch (a.kind) {
    case SpatialAtom::Kind::Emp:
      return sorted_prime(sigma, from + 1);
    case SpatialAtom::Kind::PointsTo:
      return PureFormula::conj({precede_constraint(a.args[0], tail), sorted_prime(sigma, from + 1)});
    case SpatialAtom::Kind::Arr:
      return PureFormula::conj({PureFormula::le(a.args[0], a.args[1]),
                                precede_constraint(a.args[1], tail),
                                sorted_prime(sigma, from + 1)});
    default:
      throw std::invalid_argument("sorted_constraint: list atom");
  }
}

PureFormula sorted_constraint(const SpatialFormula &sigma) {
  return PureFormula::conj(
      {precede_constraint(Term::nat(0), sigma), sorted_prime(sigma, 0)});
}

std::vector<SpatialFormula> permutations(const SpatialFormula &sigma) {
  std::vector<std::size_t> idx(sigma.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<SpatialFormula> out;
  do {
    SpatialFormula p;
    p.reserve(sigma.size());
    for (auto i : idx) p.push_back(sigma[i]);
    out.push_back(std::move(p));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

bool check_size_condition(const Entailment &e, std::string *offending) {
  for (const auto &succ : e.succedents) {
    std::set<std::string> binders(succ.bound_vars.begin(), succ.bound_vars.end());
    if (binders.empty()) continue;
    for (const auto &a : succ.spatial) {
      if (a.kind != SpatialAtom::Kind::Arr) continue;
      LinearTerm size = LinearTerm::from_term(a.args[1]).minus(LinearTerm::from_term(a.args[0]));
      for (const auto &y : binders) {
        if (size.coeff(y) != 0) {
          if (offending) *offending = render(a);
          return false;
        }
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Translation

namespace {

struct TAtom {
  enum class Kind { Emp, Pts, Arr } kind;
  std::vector<LinearTerm> args;  // Pts: addr then values; Arr: lo, hi

  static TAtom emp() { return {Kind::Emp, {}}; }
  static TAtom pts(LinearTerm addr, std::vector<LinearTerm> values) {
    TAtom a{Kind::Pts, {}};
    a.args.push_back(std::move(addr));
    for (auto &v : values) a.args.push_back(std::move(v));
    return a;
  }
  static TAtom arr(LinearTerm lo, LinearTerm hi) {
    return {Kind::Arr, {std::move(lo), std::move(hi)}};
  }
};

using TSpatial = std::vector<TAtom>;

struct TPair {
  std::size_t idx;  // fixed index in the combined succedent family
  DiffFormula pure;
  TSpatial spatial;
};

struct TState {
  DiffFormula pure;
  TSpatial left;
  std::vector<TPair> rights;
};

TAtom convert_atom(const SpatialAtom &a) {
  switch (a.kind) {
    case SpatialAtom::Kind::Emp:
      return TAtom::emp();
    case SpatialAtom::Kind::PointsTo: {
      std::vector<LinearTerm> vals;
      for (std::size_t i = 1; i < a.args.size(); ++i)
        vals.push_back(LinearTerm::from_term(a.args[i]));
      return TAtom::pts(LinearTerm::from_term(a.args[0]), std::move(vals));
    }
    case SpatialAtom::Kind::Arr:
      return TAtom::arr(LinearTerm::from_term(a.args[0]), LinearTerm::from_term(a.args[1]));
    default:
      throw std::invalid_argument("translate_P: list atom");
  }
}

TSpatial convert_spatial(const SpatialFormula &s) {
  TSpatial out;
  out.reserve(s.size());
  for (const auto &a : s) out.push_back(convert_atom(a));
  return out;
}

TSpatial tail_of(const TSpatial &s) { return TSpatial(s.begin() + 1, s.end()); }

DiffFormula precede_lin(const LinearTerm &t, const TSpatial &sigma) {
  for (const auto &a : sigma) {
    if (a.kind == TAtom::Kind::Emp) continue;
    return DiffFormula::cmp(DiffFormula::Rel::Lt, t, a.args[0]);
  }
  return DiffFormula::truth();
}

DiffFormula sorted_lin_prime(const TSpatial &sigma, std::size_t from) {
  if (from >= sigma.size()) return DiffFormula::truth();
  const TAtom &a = sigma[from];
  TSpatial tail(sigma.begin() + from + 1, sigma.end());
  switch (a.kind) {
    case TAtom::Kind::Emp:
      return sorted_lin_prime(sigma, from + 1);
    case TAtom::Kind::Pts:
      return DiffFormula::conj({precede_lin(a.args[0], tail), sorted_lin_prime(sigma, from + 1)});
    case TAtom::Kind::Arr:
      return DiffFormula::conj({DiffFormula::cmp(DiffFormula::Rel::Le, a.args[0], a.args[1]),
                                precede_lin(a.args[1], tail), sorted_lin_prime(sigma, from + 1)});
  }
  return DiffFormula::truth();
}

DiffFormula sorted_lin(const TSpatial &sigma) {
  return DiffFormula::conj(
      {precede_lin(LinearTerm::of_const(0), sigma), sorted_lin_prime(sigma, 0)});
}

using Measure = std::pair<std::size_t, std::size_t>;

struct Window {
  Measure best{SIZE_MAX, SIZE_MAX};
  std::size_t steps_since = 0;
  std::size_t s_at_best = 0;
};

class Translator {
public:
  Translator(DecisionContext &ctx, FreshGen fresh) : ctx_(ctx), fresh_(std::move(fresh)) {}

  DiffFormula run(TState st) {
    Window w;
    return translate(std::move(st), w);
  }

  std::vector<std::string> fresh_names;

private:
  DecisionContext &ctx_;
  FreshGen fresh_;
  std::size_t steps_ = 0;

  static Measure measure(const TState &st) {
    std::size_t atoms = st.left.size();
    for (const auto &p : st.rights) atoms += p.spatial.size();
    return {atoms, st.rights.size()};
  }

  void step(const TState &st, Window &w) {
    if (++steps_ > ctx_.opts.step_budget)
      throw presburger::ResourceLimitError("translation step budget exceeded");
    if (!ctx_.opts.check_measures) return;
    Measure m = measure(st);
    if (m < w.best) {
      w.best = m;
      w.steps_since = 0;
      w.s_at_best = st.rights.size();
    } else if (++w.steps_since > w.s_at_best + 2) {
      throw MeasureViolation("translation measure failed to decrease within |S|+2 steps");
    }
  }

  LinearTerm fresh_var() {
    std::string name = fresh_.fresh("z");
    fresh_names.push_back(name);
    return LinearTerm::of_var(name);
  }

  std::vector<LinearTerm> fresh_tuple(std::size_t n) {
    std::vector<LinearTerm> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(fresh_var());
    return out;
  }

  DiffFormula translate(TState st, Window w) {
    step(st, w);
    using Rel = DiffFormula::Rel;

    // (EmpL)
    if (!st.left.empty() && st.left[0].kind == TAtom::Kind::Emp) {
      st.left = tail_of(st.left);
      return translate(std::move(st), w);
    }
    // (EmpR)
    for (auto &p : st.rights) {
      if (!p.spatial.empty() && p.spatial[0].kind == TAtom::Kind::Emp) {
        p.spatial = tail_of(p.spatial);
        return translate(std::move(st), w);
      }
    }
    if (st.left.empty()) {
      // (EmpNEmp)
      for (std::size_t j = 0; j < st.rights.size(); ++j) {
        if (!st.rights[j].spatial.empty()) {
          st.rights.erase(st.rights.begin() + j);
          return translate(std::move(st), w);
        }
      }
      // (EmpEmp); covers the empty family as Pi -> False
      std::vector<DiffFormula> cases;
      for (const auto &p : st.rights) cases.push_back(p.pure);
      return DiffFormula::implies(st.pure, DiffFormula::disj(std::move(cases)));
    }
    // (NEmpEmp)
    for (std::size_t j = 0; j < st.rights.size(); ++j) {
      if (st.rights[j].spatial.empty()) {
        st.rights.erase(st.rights.begin() + j);
        return translate(std::move(st), w);
      }
    }
    // (empty)
    if (st.rights.empty())
      return DiffFormula::negation(DiffFormula::conj({st.pure, sorted_lin(st.left)}));

    // Optional shortcut: a branch whose accumulated left pure part is
    // unsatisfiable translates to a valid formula (every leaf is either
    // not(Pi and ...) or Pi -> ...), so the subtree collapses to True.
    if (ctx_.opts.prune_permutations) {
      PbFormula pi = eliminate_differences(st.pure);
      PbFormula closed = pi;
      for (const auto &v : pi.free_vars()) closed = PbFormula::exists(v, closed);
      if (!ctx_.solver.decide(closed)) return DiffFormula::truth();
    }

    const TAtom &lh = st.left[0];
    bool all_pts = true, all_arr = true;
    for (const auto &p : st.rights) {
      all_pts = all_pts && p.spatial[0].kind == TAtom::Kind::Pts;
      all_arr = all_arr && p.spatial[0].kind == TAtom::Kind::Arr;
    }

    if (lh.kind == TAtom::Kind::Pts) {
      if (all_pts) {
        // (PtsPts): drop every head, equate address and value slots.
        TState nx;
        TSpatial ltail = tail_of(st.left);
        nx.pure = DiffFormula::conj({st.pure, precede_lin(lh.args[0], ltail)});
        nx.left = std::move(ltail);
        for (const auto &p : st.rights) {
          const TAtom &rh = p.spatial[0];
          assert(rh.args.size() == lh.args.size());
          std::vector<DiffFormula> conds{p.pure};
          for (std::size_t k = 0; k < lh.args.size(); ++k)
            conds.push_back(DiffFormula::cmp(Rel::Eq, lh.args[k], rh.args[k]));
          TSpatial rtail = tail_of(p.spatial);
          conds.push_back(precede_lin(rh.args[0], rtail));
          nx.rights.push_back({p.idx, DiffFormula::conj(std::move(conds)), std::move(rtail)});
        }
        return translate(std::move(nx), w);
      }
      // (PtsArr) on the first array-headed pair.
      std::size_t j = 0;
      while (st.rights[j].spatial[0].kind != TAtom::Kind::Arr) ++j;
      const TPair &pj = st.rights[j];
      LinearTerm a = pj.spatial[0].args[0], b = pj.spatial[0].args[1];
      std::vector<LinearTerm> lvals(lh.args.begin() + 1, lh.args.end());
      TSpatial rtail = tail_of(pj.spatial);

      TState c1 = st;
      c1.pure = DiffFormula::conj({st.pure, DiffFormula::cmp(Rel::Eq, b, a)});
      c1.rights[j].spatial = rtail;
      c1.rights[j].spatial.insert(c1.rights[j].spatial.begin(), TAtom::pts(a, lvals));

      TState c2 = st;
      c2.pure = DiffFormula::conj({st.pure, DiffFormula::cmp(Rel::Lt, a, b)});
      c2.rights[j].spatial = rtail;
      c2.rights[j].spatial.insert(c2.rights[j].spatial.begin(),
                                  TAtom::arr(a.plus_const(1), b));
      c2.rights[j].spatial.insert(c2.rights[j].spatial.begin(), TAtom::pts(a, lvals));

      TState c3 = st;
      c3.pure = DiffFormula::conj({st.pure, DiffFormula::cmp(Rel::Lt, b, a)});
      c3.rights.erase(c3.rights.begin() + j);

      return DiffFormula::conj({translate(std::move(c1), w), translate(std::move(c2), w),
                                translate(std::move(c3), w)});
    }

    // Left head is an array.
    if (!all_arr) {
      // (ArrPts): unfold the left array head; fresh value slots.
      LinearTerm a = lh.args[0], b = lh.args[1];
      TSpatial ltail = tail_of(st.left);
      std::size_t nv = 0;
      for (const auto &p : st.rights)
        if (p.spatial[0].kind == TAtom::Kind::Pts) nv = p.spatial[0].args.size() - 1;

      TState c1;
      c1.pure = DiffFormula::conj({st.pure, DiffFormula::cmp(Rel::Lt, a, b)});
      c1.left = ltail;
      c1.left.insert(c1.left.begin(), TAtom::arr(a.plus_const(1), b));
      c1.left.insert(c1.left.begin(), TAtom::pts(a, fresh_tuple(nv)));
      c1.rights = st.rights;

      TState c2;
      c2.pure = DiffFormula::conj({st.pure, DiffFormula::cmp(Rel::Eq, b, a)});
      c2.left = ltail;
      c2.left.insert(c2.left.begin(), TAtom::pts(a, fresh_tuple(nv)));
      c2.rights = st.rights;

      return DiffFormula::conj({translate(std::move(c1), w), translate(std::move(c2), w)});
    }

    // (ArrArr): split over the subsets that share the minimal length.
    LinearTerm t = lh.args[0], tp = lh.args[1];
    LinearTerm m = tp.minus(t);
    TSpatial ltail = tail_of(st.left);
    std::size_t n = st.rights.size();
    std::vector<LinearTerm> msub;
    for (const auto &p : st.rights)
      msub.push_back(p.spatial[0].args[1].minus(p.spatial[0].args[0]));

    auto make_rights = [&](std::uint64_t mask, const LinearTerm &len) {
      std::vector<TPair> out;
      for (std::size_t jj = 0; jj < n; ++jj) {
        const TPair &p = st.rights[jj];
        LinearTerm tj = p.spatial[0].args[0], tjp = p.spatial[0].args[1];
        TSpatial rtail = tail_of(p.spatial);
        if (mask >> jj & 1) {
          DiffFormula pi = DiffFormula::conj(
              {p.pure, DiffFormula::cmp(Rel::Eq, t, tj), precede_lin(tjp, rtail)});
          out.push_back({p.idx, std::move(pi), std::move(rtail)});
        } else {
          DiffFormula pi = DiffFormula::conj({p.pure, DiffFormula::cmp(Rel::Eq, t, tj)});
          TSpatial sp = rtail;
          sp.insert(sp.begin(), TAtom::arr(tj.plus(len).plus_const(1), tjp));
          out.push_back({p.idx, std::move(pi), std::move(sp)});
        }
      }
      return out;
    };

    std::vector<DiffFormula> conjuncts;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
      // Family 1: the left array is among the shortest.
      std::vector<DiffFormula> conds{st.pure};
      for (std::size_t jj = 0; jj < n; ++jj)
        conds.push_back(mask >> jj & 1 ? DiffFormula::cmp(Rel::Eq, m, msub[jj])
                                       : DiffFormula::cmp(Rel::Lt, m, msub[jj]));
      conds.push_back(DiffFormula::cmp(Rel::Le, t, tp));
      conds.push_back(precede_lin(tp, ltail));
      TState c;
      c.pure = DiffFormula::conj(std::move(conds));
      c.left = ltail;
      c.rights = make_rights(mask, m);
      conjuncts.push_back(translate(std::move(c), w));
    }
    for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
      // Family 2: a right array of minimal index in the subset is shortest.
      std::size_t jmin = 0;
      std::size_t best_idx = SIZE_MAX;
      for (std::size_t jj = 0; jj < n; ++jj)
        if ((mask >> jj & 1) && st.rights[jj].idx < best_idx) {
          best_idx = st.rights[jj].idx;
          jmin = jj;
        }
      const LinearTerm &mp = msub[jmin];
      std::vector<DiffFormula> conds{st.pure, DiffFormula::cmp(Rel::Lt, mp, m)};
      for (std::size_t jj = 0; jj < n; ++jj) {
        if (jj == jmin) continue;
        conds.push_back(mask >> jj & 1 ? DiffFormula::cmp(Rel::Eq, mp, msub[jj])
                                       : DiffFormula::cmp(Rel::Lt, mp, msub[jj]));
      }
      TState c;
      c.pure = DiffFormula::conj(std::move(conds));
      c.left = ltail;
      c.left.insert(c.left.begin(), TAtom::arr(t.plus(mp).plus_const(1), tp));
      c.rights = make_rights(mask, mp);
      conjuncts.push_back(translate(std::move(c), w));
    }
    return DiffFormula::conj(std::move(conjuncts));
  }
};

}  // namespace

DiffFormula translate_P(TransProblem &p, DecisionContext &ctx) {
  std::set<std::string> avoid = free_vars(p.pure);
  {
    auto s = free_vars(p.spatial);
    avoid.insert(s.begin(), s.end());
    for (const auto &r : p.rights) {
      auto a = free_vars(r.pure);
      avoid.insert(a.begin(), a.end());
      auto b = free_vars(r.spatial);
      avoid.insert(b.begin(), b.end());
    }
    for (const auto &z : p.fresh_zs) avoid.insert(z);
  }
  Translator tr(ctx, FreshGen(std::move(avoid)));
  TState st;
  st.pure = DiffFormula::from_pure(p.pure);
  st.left = convert_spatial(p.spatial);
  for (std::size_t i = 0; i < p.rights.size(); ++i)
    st.rights.push_back({i, DiffFormula::from_pure(p.rights[i].pure),
                         convert_spatial(p.rights[i].spatial)});
  DiffFormula out = tr.run(std::move(st));
  for (auto &z : tr.fresh_names) p.fresh_zs.push_back(std::move(z));
  return out;
}

// ---------------------------------------------------------------------------
// Satisfiability of list-free heaps

bool heap_satisfiable(const SymbolicHeap &h, DecisionContext &ctx) {
  for (const auto &perm : permutations(h.spatial)) {
    if (ctx.solver.is_satisfiable(PureFormula::conj({h.pure, sorted_constraint(perm)})))
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// decide_sla

Verdict decide_sla(const Entailment &e, DecisionContext &ctx) {
  if (!is_list_free(e)) throw std::invalid_argument("decide_sla: input contains list atoms");
  std::string bad;
  if (!check_size_condition(e, &bad)) return {VerdictKind::ConditionViolated, bad};

  try {
    FreshGen fresh(free_vars(e));

    // Antecedent existentials are dropped after renaming apart.
    SymbolicHeap ante = e.antecedent;
    if (!ante.bound_vars.empty()) {
      TermSubst s;
      for (const auto &v : ante.bound_vars) s.insert_or_assign(v, Term::var(fresh.fresh(v)));
      ante.pure = substitute(ante.pure, s, fresh);
      ante.spatial = substitute(ante.spatial, s);
      ante.bound_vars.clear();
    }

    // Succedent binders become the exists prefix, renamed apart.
    std::vector<std::string> ys;
    std::vector<std::pair<PureFormula, SpatialFormula>> succs;
    for (const auto &sh : e.succedents) {
      TermSubst s;
      for (const auto &v : sh.bound_vars) {
        std::string nv = fresh.fresh(v);
        s.insert_or_assign(v, Term::var(nv));
        ys.push_back(nv);
      }
      succs.push_back({substitute(sh.pure, s, fresh), substitute(sh.spatial, s)});
    }

    std::size_t perm_no = 0;
    for (const auto &perm : permutations(ante.spatial)) {
      ++perm_no;
      if (ctx.opts.prune_permutations &&
          !ctx.solver.is_satisfiable(PureFormula::conj({ante.pure, sorted_constraint(perm)}))) {
        ctx.note("sla: antecedent permutation " + std::to_string(perm_no) + " pruned");
        continue;
      }

      // The decomposition works on sorted heaps: Sigma~ is Sorted(Sigma) and
      // Sigma, so the sorted constraints belong to the pure parts.  The
      // recursive clauses re-derive most of them step by step but lose the
      // positivity of consumed head addresses, so they are asserted here.
      TransProblem tp;
      tp.pure = PureFormula::conj({ante.pure, sorted_constraint(perm)});
      tp.spatial = perm;
      std::set<std::string> seen_pairs;
      for (const auto &[pi, sigma] : succs) {
        for (const auto &sp : permutations(sigma)) {
          if (ctx.opts.prune_permutations &&
              !ctx.solver.is_satisfiable(
                  PureFormula::conj({ante.pure, pi, sorted_constraint(sp)})))
            continue;
          RightPair pair{PureFormula::conj({pi, sorted_constraint(sp)}), sp};
          // identical disjuncts are idempotent in the succedent disjunction
          std::string key = render(pair.pure) + "|" + render(pair.spatial);
          if (seen_pairs.insert(std::move(key)).second) tp.rights.push_back(std::move(pair));
        }
      }

      DiffFormula raw = translate_P(tp, ctx);
      PbFormula f = eliminate_differences(raw);

      PbFormula sentence = f;
      for (auto it = ys.rbegin(); it != ys.rend(); ++it)
        sentence = PbFormula::exists(*it, sentence);
      auto fv = f.free_vars();
      for (auto it = tp.fresh_zs.rbegin(); it != tp.fresh_zs.rend(); ++it)
        if (fv.count(*it)) sentence = PbFormula::forall(*it, sentence);
      for (const auto &v : sentence.free_vars()) sentence = PbFormula::forall(v, sentence);

      if (ctx.obligations)
        ctx.obligations->push_back({render(perm), sentence});
      if (ctx.opts.export_only) continue;

      if (!ctx.solver.decide(sentence)) {
        ctx.note("sla: permutation " + render(perm) + " refuted");
        return {VerdictKind::Invalid, render(perm)};
      }
    }
    return {VerdictKind::Valid, {}};
  } catch (const presburger::ResourceLimitError &err) {
    return {VerdictKind::ResourceExceeded, err.what()};
  }
}

}  // namespace slent::sla
