#pragma once

// Slow reference implementations used to check the real ones. Each works
// straight from the definitions and shares no code with the library beyond
// the IR types and substitution.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "charon/ir.hpp"
#include "charon/traits.hpp"

namespace oracle {

std::vector<std::size_t> succs(const charon::ullbc::Body& body, std::size_t b);
std::set<std::size_t> reachable(const charon::ullbc::Body& body, std::optional<std::size_t> removed = std::nullopt);

/// dom[b] = blocks dominating b (b included); empty for unreachable b.
/// a dominates b iff b is unreachable once a is deleted (or a == b).
std::vector<std::set<std::size_t>> dominators(const charon::ullbc::Body& body);

/// Natural loops keyed by header: union over back edges t -> h (h dominates t)
/// of the blocks that reach t without passing through h, plus h.
std::map<std::size_t, std::set<std::size_t>> natural_loops(const charon::ullbc::Body& body);

/// T1/T2 reduction of the reachable subgraph down to one node.
bool reducible(const charon::ullbc::Body& body);

struct Derivations {
  // Derivation trees found, at most two kept (enough to tell unique from ambiguous).
  std::vector<charon::TraitRefKind> trees;
};

/// Enumerates derivations of `goal`: the first clause (breadth-first over the
/// where-clauses and their parent traits) proving exactly the goal, plus every
/// impl whose head equals the goal under some assignment of its parameters to
/// subterms of the goal, combined with derivations of its where-clauses. A
/// goal already on the current path is not expanded again; nodes deeper than
/// `max_depth` (the root is level 1) have no derivations.
Derivations derive(const charon::TranslatedCrate& crate, const charon::GenericParams& params,
                   const charon::TraitGoal& goal, std::uint32_t max_depth);

}  // namespace oracle
