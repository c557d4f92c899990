// Parser for the norm definition language.
//
// Surface syntax accepted (uppercase words are keywords, [] marks options):
//
//   NORM Name
//   [ON ?e1 WHERE conditions THEN]
//      [COMPUTE ?v = expr; ...]
//      CREATE Class(?v); ...
//      ASSERT prop(term,term); ...
//      ON ?e2 [BEFORE ?e3 [WHERE conditions-on-e3]]
//         WHERE conditions
//      THEN ASSERT prop(term,term); ...
//      [ELSE ASSERT prop(term,term); ...]
//
//   EXCEPTION [Name] TO Target [TYPE n]
//   ON ?ev WHERE conditions
//   THEN exceptionToNorm(Target,?ev) | exceptionToDR(?dr,?ev)
//        | exceptionToException(Target,?ev)
//
// Conditions are AND-joined atoms: Class(?x), prop(?x,term), comparisons
// over arithmetic on variables, literals, durations ("24 hours"), clock
// sugar ("7 a.m."), time-field accessors (?t.hour), and NOT atom.
//
// Statements are ';'-separated; a trailing ';' before a keyword is allowed.
// '#' starts a line comment. Variables beginning with "__" are reserved for
// the translator and rejected here.
#pragma once

#include <string>
#include <vector>

#include "tnorm/ast.hpp"

namespace tnorm {

// Parses and validates a rule file. Throws SyntaxError on malformed input
// and ValidationError (or a subclass) on semantic problems.
std::vector<RuleItem> parse_norms(const std::string& text, const std::string& filename = "<norms>");

std::vector<RuleItem> load_norms_file(const std::string& path);

} // namespace tnorm
