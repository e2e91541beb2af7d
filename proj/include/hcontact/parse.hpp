#pragma once

#include "hcontact/expr.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hcontact {

/// Names visible to the expression parser. Variables map to Var(index) in
/// declaration order; constants are substituted by value. `pi` is predefined
/// unless shadowed.
struct Symbols {
    std::vector<std::string> variables;
    std::map<std::string, cplx> constants;
};

/// Parses infix expression text:
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := atom ('^' integer | '^' '(' integer ')')?
///   atom    := number | number 'i' | 'i' | name | call | '(' sum ')'
///   call    := 'exp(' sum ')' | ('log' | 'sqrt') '(' sum (';' integer)? ')'
/// Raises ParseError with a 1-based column (line 1) and the offending token.
Expr parse_expr(std::string_view text, const Symbols& symbols);

} // namespace hcontact
