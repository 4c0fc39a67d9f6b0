#pragma once

// Rendering of syntax back to the surface DSL.  For surface-grammar ASTs the
// output re-parses to an alpha-equivalent tree.

#include <string>

#include "slent/syntax.hpp"

namespace slent {

std::string render(const Term &t);
std::string render(const PureFormula &f);
std::string render(const SpatialAtom &a);
std::string render(const SpatialFormula &s);
std::string render(const SymbolicHeap &h);
std::string render(const Entailment &e);

}  // namespace slent
