#pragma once

// Brute-force reference semantics: satisfaction of symbolic heaps under
// explicit stores and finite heaps, bounded model enumeration, and bounded
// countermodel search.  Never part of the shipped verdict; the deciders are
// checked against it differentially.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "slent/syntax.hpp"

namespace slent::oracle {

using Store = std::map<std::string, std::uint64_t>;
using Cell = std::vector<std::uint64_t>;          // pt value slots
using HeapModel = std::map<std::uint64_t, Cell>;  // addresses are >= 1

struct Bounds {
  std::uint64_t max_value = 8;
  std::size_t max_heap_size = 5;
  // 0 means "derive": a list in a heap of n cells needs at most n+1
  // unfoldings, so max_heap_size + 1 is always enough.
  std::size_t max_unfold = 0;

  std::size_t unfold_limit() const { return max_unfold ? max_unfold : max_heap_size + 1; }
};

std::uint64_t eval_term(const Store &s, const Term &t);

// Pure satisfaction; quantifiers are enumerated over [0, max_value].
bool satisfies(const Store &s, const PureFormula &f, const Bounds &b);

// Full symbolic-heap satisfaction.  Points-to and array atoms have
// store-determined footprints and are matched greedily; only list atoms
// need the remaining cells distributed.
bool satisfies(const Store &s, const HeapModel &h, const SymbolicHeap &heap, const Bounds &b);

// Reference version enumerating every binary heap split; exponential, used
// to cross-check the greedy matcher on small cases.
bool satisfies_naive(const Store &s, const HeapModel &h, const SymbolicHeap &heap,
                     const Bounds &b);

// Enumerates every model of a QF symbolic heap with store values,
// heap addresses and cell values all bounded by max_value and at most
// max_heap_size cells, in a fixed deterministic order.  The visitor returns
// false to stop early.
void enumerate_models(const SymbolicHeap &heap, const Bounds &b, unsigned pt,
                      const std::function<bool(const Store &, const HeapModel &)> &visit);

// First store/heap pair satisfying the antecedent and none of the
// succedents.  Free cell slots (array contents, list payloads) are filled
// with a fresh value distinct from every term value and address, which is
// sufficient: no formula of the fragment can compare two heap slots with
// each other, only against term values and addresses.
//
// max_work caps the number of explored candidate shapes (0 = exhaustive).
// A capped search stays sound: it can only fail to find a countermodel.
std::optional<std::pair<Store, HeapModel>> find_countermodel(const Entailment &e,
                                                             const Bounds &b,
                                                             std::size_t max_work = 0);

}  // namespace slent::oracle
