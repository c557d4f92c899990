// Line-oriented triple files, an N-Triples-compatible subset:
//
//   SellAction rdfs:subClassOf TransferAction .
//   car1 a Vehicle .
//   i1 inXSDDateTimeStamp "2021-03-01T07:30:00Z"^^xsd:dateTimeStamp .
//   e2 price 6 .
//   e2 recipient "Milan" .
//
// `rdf:type` is an alias for `a`. Lines whose first non-blank character is
// `#` are comments. Bare objects parse as integer/decimal when they look
// numeric, resource reference otherwise.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tnorm/kb.hpp"

namespace tnorm {

struct TripleDoc {
    std::vector<SchemaAxiom> axioms;
    std::vector<Fact> facts; // STATE partition, asserted origin
};

TripleDoc parse_triples(std::string_view text, const std::string& filename = "input");
TripleDoc load_triples_file(const std::string& path);

} // namespace tnorm
