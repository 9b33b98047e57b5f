#pragma once

// Control-flow reconstruction: CFG bodies (ULLBC) to structured bodies (LLBC).

#include <optional>
#include <set>
#include <vector>

#include "charon/ir.hpp"

namespace charon {

/// Immediate dominators indexed by block; idom[entry] == entry and blocks
/// unreachable from the entry have no entry.
using DominatorTree = std::vector<std::optional<BlockId>>;

DominatorTree compute_dominators(const ullbc::Body& body);
bool dominates(const DominatorTree& idom, BlockId a, BlockId b);

struct NaturalLoop {
  BlockId header;
  std::set<BlockId> blocks;  // includes the header
  std::optional<std::size_t> parent;  // index of the innermost enclosing loop
};

/// Loops ordered outermost first (by nesting, then by header id).
/// Throws Error("irreducible-cfg") when a cycle is entered other than through
/// a dominating header.
std::vector<NaturalLoop> find_loops(const ullbc::Body& body, const DominatorTree& idom);

/// Maximum number of times one CFG block may be emitted in the structured body.
inline constexpr int kDuplicationCap = 4;

/// Structured form of `body`: loops become `loop`, branch joins are placed at
/// immediate post-dominators, back edges become `continue` and loop exits
/// `break`. Throws Error with code `irreducible-cfg`, `multi-exit-unsupported`
/// or `duplication-cap-exceeded`.
llbc::Body restructure(const TranslatedCrate& crate, const ullbc::Body& body);

/// Restructures every CFG body in place; bodies that fail become opaque and
/// produce one diagnostic each.
Diagnostics restructure_crate(TranslatedCrate& crate);

/// Structural checks on a structured body: break/continue depths are within
/// the enclosing loops and every path ends in return, abort, break or continue.
Diagnostics validate_llbc(const llbc::Body& body);

}  // namespace charon
