#include "slent/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace slent::oracle {

std::uint64_t eval_term(const Store &s, const Term &t) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = s.find(t.var_name());
      if (it == s.end()) throw std::logic_error("store not total: " + t.var_name());
      return it->second;
    }
    case Term::Kind::Const:
      return t.const_value();
    case Term::Kind::Sum:
      return eval_term(s, t.lhs()) + eval_term(s, t.rhs());
  }
  return 0;
}

bool satisfies(const Store &s, const PureFormula &f, const Bounds &b) {
  using K = PureFormula::Kind;
  switch (f.kind()) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Eq:
      return eval_term(s, f.lhs()) == eval_term(s, f.rhs());
    case K::Neq:
      return eval_term(s, f.lhs()) != eval_term(s, f.rhs());
    case K::Le:
      return eval_term(s, f.lhs()) <= eval_term(s, f.rhs());
    case K::Lt:
      return eval_term(s, f.lhs()) < eval_term(s, f.rhs());
    case K::And:
      for (const auto &k : f.children())
        if (!satisfies(s, k, b)) return false;
      return true;
    case K::Or:
      for (const auto &k : f.children())
        if (satisfies(s, k, b)) return true;
      return false;
    case K::Not:
      return !satisfies(s, f.children()[0], b);
    case K::Exists: {
      if (b.max_value == 0)
        throw std::invalid_argument("quantifier evaluation needs max_value > 0");
      Store s2 = s;
      for (std::uint64_t v = 0; v <= b.max_value; ++v) {
        s2[f.bound_var()] = v;
        if (satisfies(s2, f.children()[0], b)) return true;
      }
      return false;
    }
  }
  return false;
}

namespace {

// Walks a singly-linked segment over exactly the cells of h, from `from`
// to `to`.  Cyclic segments are fine; every cell is consumed once.
bool ls_covers(const HeapModel &h, std::uint64_t from, std::uint64_t to, std::size_t max_unfold) {
  if (h.empty()) return from == to;
  if (h.size() + 1 > max_unfold) return false;
  HeapModel rest = h;
  std::uint64_t cur = from;
  while (!rest.empty()) {
    auto it = rest.find(cur);
    if (it == rest.end()) return false;
    std::uint64_t next = it->second.at(0);
    rest.erase(it);
    cur = next;
  }
  return cur == to;
}

bool dll_covers(const HeapModel &h, std::uint64_t t, std::uint64_t u, std::uint64_t v,
                std::uint64_t w, std::size_t max_unfold) {
  if (h.empty()) return t == u && v == w;
  if (h.size() + 1 > max_unfold) return false;
  HeapModel rest = h;
  std::uint64_t cur = t, prev = w;
  std::uint64_t last = 0;
  while (!rest.empty()) {
    auto it = rest.find(cur);
    if (it == rest.end()) return false;
    if (it->second.at(1) != prev) return false;
    std::uint64_t next = it->second.at(0);
    last = cur;
    rest.erase(it);
    prev = cur;
    cur = next;
  }
  return cur == u && last == v;
}

bool atom_covers(const Store &s, const HeapModel &h, const SpatialAtom &a, const Bounds &b) {
  using K = SpatialAtom::Kind;
  switch (a.kind) {
    case K::Emp:
      return h.empty();
    case K::PointsTo: {
      if (h.size() != 1) return false;
      std::uint64_t addr = eval_term(s, a.args[0]);
      auto it = h.find(addr);
      if (it == h.end()) return false;
      if (it->second.size() != a.args.size() - 1) return false;
      for (std::size_t i = 1; i < a.args.size(); ++i)
        if (it->second[i - 1] != eval_term(s, a.args[i])) return false;
      return true;
    }
    case K::Arr: {
      std::uint64_t lo = eval_term(s, a.args[0]);
      std::uint64_t hi = eval_term(s, a.args[1]);
      if (lo > hi) return false;
      if (h.size() != hi - lo + 1) return false;
      for (std::uint64_t x = lo; x <= hi; ++x)
        if (!h.count(x)) return false;
      return true;
    }
    case K::Ls:
      return ls_covers(h, eval_term(s, a.args[0]), eval_term(s, a.args[1]), b.unfold_limit());
    case K::Dll:
      return dll_covers(h, eval_term(s, a.args[0]), eval_term(s, a.args[1]),
                        eval_term(s, a.args[2]), eval_term(s, a.args[3]), b.unfold_limit());
  }
  return false;
}

// Greedy matcher: consume the determined footprints first, then distribute
// the leftover cells over the list atoms.
bool spatial_sat(const Store &s, const HeapModel &h, const SpatialFormula &atoms,
                 const Bounds &b) {
  HeapModel rest = h;
  std::vector<const SpatialAtom *> lists;
  for (const auto &a : atoms) {
    switch (a.kind) {
      case SpatialAtom::Kind::Emp:
        break;
      case SpatialAtom::Kind::PointsTo: {
        std::uint64_t addr = eval_term(s, a.args[0]);
        auto it = rest.find(addr);
        if (it == rest.end()) return false;
        if (it->second.size() != a.args.size() - 1) return false;
        for (std::size_t i = 1; i < a.args.size(); ++i)
          if (it->second[i - 1] != eval_term(s, a.args[i])) return false;
        rest.erase(it);
        break;
      }
      case SpatialAtom::Kind::Arr: {
        std::uint64_t lo = eval_term(s, a.args[0]);
        std::uint64_t hi = eval_term(s, a.args[1]);
        if (lo > hi) return false;
        for (std::uint64_t x = lo; x <= hi; ++x) {
          auto it = rest.find(x);
          if (it == rest.end()) return false;
          rest.erase(it);
        }
        break;
      }
      case SpatialAtom::Kind::Ls:
      case SpatialAtom::Kind::Dll:
        lists.push_back(&a);
        break;
    }
  }
  if (lists.empty()) return rest.empty();
  // Label each leftover cell with the list atom that absorbs it.
  std::vector<std::pair<std::uint64_t, Cell>> cells(rest.begin(), rest.end());
  std::vector<std::size_t> label(cells.size(), 0);
  for (;;) {
    std::vector<HeapModel> parts(lists.size());
    for (std::size_t i = 0; i < cells.size(); ++i) parts[label[i]].insert(cells[i]);
    bool ok = true;
    for (std::size_t j = 0; j < lists.size() && ok; ++j)
      ok = atom_covers(s, parts[j], *lists[j], b);
    if (ok) return true;
    std::size_t i = 0;
    while (i < cells.size()) {
      if (++label[i] < lists.size()) break;
      label[i] = 0;
      ++i;
    }
    if (i == cells.size()) return false;
  }
}

bool spatial_sat_naive(const Store &s, const HeapModel &h,
                       const SpatialFormula &atoms, std::size_t idx, const Bounds &b) {
  if (idx == atoms.size()) return h.empty();
  if (idx + 1 == atoms.size()) return atom_covers(s, h, atoms[idx], b);
  std::vector<std::pair<std::uint64_t, Cell>> cells(h.begin(), h.end());
  std::size_t n = cells.size();
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    HeapModel h1, h2;
    for (std::size_t i = 0; i < n; ++i)
      (mask >> i & 1 ? h1 : h2).insert(cells[i]);
    if (atom_covers(s, h1, atoms[idx], b) && spatial_sat_naive(s, h2, atoms, idx + 1, b))
      return true;
  }
  return false;
}

bool heap_sat(const Store &s, const HeapModel &h, const SymbolicHeap &heap, const Bounds &b,
              bool naive) {
  // Existential binders range over [0, max_value].
  std::vector<std::string> binders = heap.bound_vars;
  Store s2 = s;
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == binders.size()) {
      if (!satisfies(s2, heap.pure, b)) return false;
      return naive ? spatial_sat_naive(s2, h, heap.spatial, 0, b)
                   : spatial_sat(s2, h, heap.spatial, b);
    }
    for (std::uint64_t v = 0; v <= b.max_value; ++v) {
      s2[binders[i]] = v;
      if (go(i + 1)) return true;
    }
    return false;
  };
  return go(0);
}

}  // namespace

bool satisfies(const Store &s, const HeapModel &h, const SymbolicHeap &heap, const Bounds &b) {
  return heap_sat(s, h, heap, b, false);
}

bool satisfies_naive(const Store &s, const HeapModel &h, const SymbolicHeap &heap,
                     const Bounds &b) {
  return heap_sat(s, h, heap, b, true);
}

// ---------------------------------------------------------------------------
// Model enumeration

void enumerate_models(const SymbolicHeap &heap, const Bounds &b, unsigned pt,
                      const std::function<bool(const Store &, const HeapModel &)> &visit) {
  auto fv = free_vars(heap);
  std::vector<std::string> vars(fv.begin(), fv.end());
  Store s;
  for (const auto &v : vars) s[v] = 0;

  // Domain subsets of [1, max_value] up to max_heap_size, then cell values.
  std::vector<std::uint64_t> addrs;
  for (std::uint64_t a = 1; a <= b.max_value; ++a) addrs.push_back(a);

  std::function<bool(std::size_t, std::vector<std::uint64_t> &)> domains =
      [&](std::size_t from, std::vector<std::uint64_t> &dom) -> bool {
    // Enumerate values of every slot of the current domain.
    std::size_t slots = dom.size() * pt;
    std::vector<std::uint64_t> val(slots, 0);
    for (;;) {
      HeapModel h;
      for (std::size_t i = 0; i < dom.size(); ++i)
        h[dom[i]] = Cell(val.begin() + i * pt, val.begin() + (i + 1) * pt);
      if (satisfies(s, h, heap, b)) {
        if (!visit(s, h)) return false;
      }
      std::size_t i = 0;
      while (i < slots) {
        if (++val[i] <= b.max_value) break;
        val[i] = 0;
        ++i;
      }
      if (i == slots) break;
    }
    if (dom.size() == b.max_heap_size) return true;
    for (std::size_t i = from; i < addrs.size(); ++i) {
      dom.push_back(addrs[i]);
      if (!domains(i + 1, dom)) return false;
      dom.pop_back();
    }
    return true;
  };

  std::function<bool(std::size_t)> stores = [&](std::size_t i) -> bool {
    if (i == vars.size()) {
      std::vector<std::uint64_t> dom;
      return domains(0, dom);
    }
    for (std::uint64_t v = 0; v <= b.max_value; ++v) {
      s[vars[i]] = v;
      if (!stores(i + 1)) return false;
    }
    return true;
  };
  stores(0);
}

// ---------------------------------------------------------------------------
// Countermodel search

namespace {

// A heap under construction: determined cells plus addresses whose slots are
// free (array contents and list payloads).
struct Shape {
  HeapModel cells;
  std::vector<std::pair<std::uint64_t, std::size_t>> free_slots;  // (addr, slot index)
};

// Spatial-atom argument terms with no bound variables: the values that heap
// slots can be compared against.
void collect_terms(const Entailment &e, std::vector<Term> &out) {
  auto add_heap = [&](const SymbolicHeap &h) {
    std::set<std::string> binders(h.bound_vars.begin(), h.bound_vars.end());
    for (const auto &a : h.spatial)
      for (const auto &t : a.args) {
        auto fv = free_vars(t);
        bool closed = std::none_of(fv.begin(), fv.end(),
                                   [&](const std::string &v) { return binders.count(v); });
        if (closed) out.push_back(t);
      }
  };
  add_heap(e.antecedent);
  for (const auto &s : e.succedents) add_heap(s);
}

unsigned deduce_pt(const Entailment &e) {
  unsigned pt = 2;
  auto scan = [&](const SymbolicHeap &h) {
    for (const auto &a : h.spatial)
      if (a.kind == SpatialAtom::Kind::PointsTo) pt = static_cast<unsigned>(a.args.size() - 1);
  };
  scan(e.antecedent);
  for (const auto &s : e.succedents) scan(s);
  return pt;
}

}  // namespace

std::optional<std::pair<Store, HeapModel>> find_countermodel(const Entailment &e,
                                                             const Bounds &b,
                                                             std::size_t max_work) {
  auto fv = free_vars(e);
  std::vector<std::string> vars(fv.begin(), fv.end());
  std::vector<Term> terms;
  collect_terms(e, terms);
  unsigned pt = deduce_pt(e);

  Store s;
  std::optional<std::pair<Store, HeapModel>> found;
  std::size_t work = 0;
  auto spent = [&]() { return max_work != 0 && ++work > max_work; };

  // Succedent existentials make `satisfies` enumerate; fine at these bounds.
  auto counters = [&](const HeapModel &h) {
    if (!satisfies(s, h, e.antecedent, b)) return false;  // sanity; shapes satisfy
    for (const auto &succ : e.succedents)
      if (satisfies(s, h, succ, b)) return false;
    return true;
  };

  std::function<bool(std::size_t, Shape &)> shapes;  // over antecedent atoms

  auto finish = [&](Shape &sh) -> bool {
    if (spent()) return true;  // budget exhausted: stop without a result
    // Fill every free slot with one fresh value, distinct from all term
    // values and addresses.  Slots are never compared with each other, only
    // against terms and addresses, so if any slot assignment falsifies the
    // succedents this one does.  The fresh value must stay inside
    // [0, max_value] so that bounded succedent quantifiers can still reach
    // it; when the whole range is taken, small slot counts fall back to
    // plain enumeration.
    std::set<std::uint64_t> taken;
    for (const auto &t : terms) taken.insert(eval_term(s, t));
    for (const auto &[addr, cell] : sh.cells) taken.insert(addr);
    std::optional<std::uint64_t> fresh;
    for (std::uint64_t v = 0; v <= b.max_value; ++v)
      if (!taken.count(v)) {
        fresh = v;
        break;
      }
    HeapModel h = sh.cells;
    if (fresh) {
      for (const auto &[addr, slot] : sh.free_slots) h[addr][slot] = *fresh;
      if (counters(h)) {
        found = {s, h};
        return true;
      }
      return false;
    }
    if (sh.free_slots.size() > 4) return false;  // give up on this shape
    std::vector<std::uint64_t> val(sh.free_slots.size(), 0);
    for (;;) {
      for (std::size_t i = 0; i < sh.free_slots.size(); ++i)
        h[sh.free_slots[i].first][sh.free_slots[i].second] = val[i];
      if (counters(h)) {
        found = {s, h};
        return true;
      }
      std::size_t i = 0;
      while (i < val.size()) {
        if (++val[i] <= b.max_value) break;
        val[i] = 0;
        ++i;
      }
      if (i == val.size() || val.empty()) return false;
    }
  };

  const auto &atoms = e.antecedent.spatial;
  shapes = [&](std::size_t idx, Shape &sh) -> bool {
    if (spent()) return true;
    if (sh.cells.size() > b.max_heap_size) return false;
    if (idx == atoms.size()) return finish(sh);
    const SpatialAtom &a = atoms[idx];
    using K = SpatialAtom::Kind;
    switch (a.kind) {
      case K::Emp:
        return shapes(idx + 1, sh);
      case K::PointsTo: {
        std::uint64_t addr = eval_term(s, a.args[0]);
        if (addr < 1 || addr > b.max_value || sh.cells.count(addr)) return false;
        Cell cell;
        for (std::size_t i = 1; i < a.args.size(); ++i) cell.push_back(eval_term(s, a.args[i]));
        sh.cells[addr] = std::move(cell);
        bool stop = shapes(idx + 1, sh);
        sh.cells.erase(addr);
        return stop;
      }
      case K::Arr: {
        std::uint64_t lo = eval_term(s, a.args[0]);
        std::uint64_t hi = eval_term(s, a.args[1]);
        if (lo < 1 || lo > hi || hi > b.max_value) return false;
        if (sh.cells.size() + (hi - lo + 1) > b.max_heap_size) return false;
        for (std::uint64_t x = lo; x <= hi; ++x)
          if (sh.cells.count(x)) return false;
        for (std::uint64_t x = lo; x <= hi; ++x) {
          sh.cells[x] = Cell(pt, 0);
          for (unsigned k = 0; k < pt; ++k) sh.free_slots.push_back({x, k});
        }
        bool stop = shapes(idx + 1, sh);
        for (std::uint64_t x = lo; x <= hi; ++x) sh.cells.erase(x);
        sh.free_slots.resize(sh.free_slots.size() - (hi - lo + 1) * pt);
        return stop;
      }
      case K::Ls: {
        std::uint64_t from = eval_term(s, a.args[0]);
        std::uint64_t to = eval_term(s, a.args[1]);
        // Empty segment.
        if (from == to && shapes(idx + 1, sh)) return true;
        // Chains of distinct new cells from `from`, last one pointing to `to`.
        std::vector<std::uint64_t> chain;
        std::function<bool(std::uint64_t)> grow = [&](std::uint64_t cur) -> bool {
          if (cur < 1 || cur > b.max_value || sh.cells.count(cur)) return false;
          if (sh.cells.size() + 1 > b.max_heap_size) return false;
          if (chain.size() + 2 > b.unfold_limit()) return false;
          chain.push_back(cur);
          // Close the chain here: cur -> to.
          sh.cells[cur] = Cell{to, 0};
          sh.free_slots.push_back({cur, 1});
          bool stop = shapes(idx + 1, sh);
          sh.free_slots.pop_back();
          sh.cells.erase(cur);
          if (stop) {
            chain.pop_back();
            return true;
          }
          // Or continue through any next address.
          for (std::uint64_t nxt = 1; nxt <= b.max_value && !stop; ++nxt) {
            if (sh.cells.count(nxt)) continue;
            bool in_chain = std::find(chain.begin(), chain.end(), nxt) != chain.end();
            if (in_chain) continue;
            sh.cells[cur] = Cell{nxt, 0};
            sh.free_slots.push_back({cur, 1});
            stop = grow(nxt);
            sh.free_slots.pop_back();
            sh.cells.erase(cur);
          }
          chain.pop_back();
          return stop;
        };
        return grow(from);
      }
      case K::Dll: {
        std::uint64_t t = eval_term(s, a.args[0]);
        std::uint64_t u = eval_term(s, a.args[1]);
        std::uint64_t v = eval_term(s, a.args[2]);
        std::uint64_t w = eval_term(s, a.args[3]);
        if (t == u && v == w && shapes(idx + 1, sh)) return true;
        // Nonempty: cells t .. v doubly linked, last points to u, first back to w.
        std::vector<std::uint64_t> chain;
        std::function<bool(std::uint64_t, std::uint64_t)> grow =
            [&](std::uint64_t cur, std::uint64_t prev) -> bool {
          if (cur < 1 || cur > b.max_value || sh.cells.count(cur)) return false;
          if (sh.cells.size() + 1 > b.max_heap_size) return false;
          if (chain.size() + 2 > b.unfold_limit()) return false;
          chain.push_back(cur);
          bool stop = false;
          if (cur == v) {  // last cell
            sh.cells[cur] = Cell{u, prev};
            stop = shapes(idx + 1, sh);
            sh.cells.erase(cur);
          }
          for (std::uint64_t nxt = 1; nxt <= b.max_value && !stop; ++nxt) {
            if (sh.cells.count(nxt)) continue;
            if (std::find(chain.begin(), chain.end(), nxt) != chain.end()) continue;
            sh.cells[cur] = Cell{nxt, prev};
            stop = grow(nxt, cur);
            sh.cells.erase(cur);
          }
          chain.pop_back();
          return stop;
        };
        return grow(t, w);
      }
    }
    return false;
  };

  std::function<bool(std::size_t)> stores = [&](std::size_t i) -> bool {
    if (i == vars.size()) {
      if (!satisfies(s, e.antecedent.pure, b)) return false;
      Shape sh;
      return shapes(0, sh);
    }
    for (std::uint64_t v = 0; v <= b.max_value; ++v) {
      s[vars[i]] = v;
      if (stores(i + 1)) return true;
    }
    return false;
  };
  stores(0);
  return found;
}

}  // namespace slent::oracle
