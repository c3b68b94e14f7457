#pragma once

#include <string>

#include "gaan/graph.hpp"

namespace gaan {

// Parses a SMILES string restricted to the organic subset: atoms
// B C N O P S F Cl Br I, aromatic c n o s, bonds - = #, parenthesized
// branches, and single-digit ring closures 1-9. No brackets, charges,
// isotopes, or stereo marks. Produces the heavy-atom graph; valence counts
// the bond-order excess of explicit bonds; an edge between two aromatic
// atoms that lies on a ring and carries no explicit order becomes aromatic.
// Errors are SmilesError with the offending byte offset.
AttributedGraph parse_smiles(const std::string& s);

}  // namespace gaan
