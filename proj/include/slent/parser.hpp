#pragma once

// Recursive-descent parser for the entailment DSL:
//
//   entailment := sheap "|-" [ sheap { "," sheap } ]
//   sheap      := [ "Ex" ident+ "." ] [ pure "&" ] spatial
//   pure       := patom { "&" patom }
//   patom      := term ("="|"!="|"<"|"<="|">"|">=") term | "true" | "false"
//   spatial    := satom { "*" satom }
//   satom      := "Emp" | term "->" "(" term {"," term} ")"
//               | "Arr(" term "," term ")" | "ls(" term "," term ")"
//               | "dll(" term "," term "," term "," term ")"
//   term       := factor { "+" factor }      factor := ident | natural
//
// An empty succedent list after "|-" denotes the empty disjunction (False).

#include <stdexcept>
#include <string>

#include "slent/syntax.hpp"

namespace slent {

struct ParseOptions {
  unsigned pt = 2;  // points-to arity; ls/dll atoms require pt == 2
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::string msg, int line, int column)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line(line),
        column(column) {}
  int line;
  int column;
};

Entailment parse_entailment(const std::string &text, const ParseOptions &opts = {});

}  // namespace slent
