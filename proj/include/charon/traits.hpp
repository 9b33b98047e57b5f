#pragma once

// Trait resolution: finding the instance (impl or local clause) behind each
// trait obligation, splitting method generics, normalizing associated types.

#include <optional>
#include <utility>
#include <vector>

#include "charon/ir.hpp"

namespace charon {

/// One clause reachable from a declaration's where-clauses: `path` is how the
/// instance is named, `clause` what it proves (args instantiated).
struct ImpliedClause {
  TraitRefKind path;
  TraitClause clause;
  std::uint32_t depth = 0;  // 0 for declared clauses
  bool operator==(const ImpliedClause&) const = default;
};

inline constexpr std::uint32_t kElaborationDepthCap = 32;

struct ClauseClosure {
  std::vector<ImpliedClause> clauses;  // breadth-first order; one entry per (trait, args)
  Diagnostics diagnostics;             // `clause-depth-exceeded`
};

/// Declared clauses plus, transitively, their parent-trait and associated-type
/// clauses. Each (trait, args) pair appears once, under its first path in
/// breadth-first order.
ClauseClosure elaborate_implied_clauses(const TranslatedCrate& crate, const GenericParams& params);

struct TraitGoal {
  TraitDeclId trait;
  GenericArgs args;  // types[0] is the self type; trait_refs are ignored
  bool operator==(const TraitGoal&) const = default;
};

struct ResolveOptions {
  std::uint32_t max_depth = 32;  // derivations deeper than this are not explored
};

/// Finds the unique derivation of `goal` from the where-clauses in `params`
/// and the crate's impls. Candidates are the matching clause (if any) and every
/// impl whose head matches and whose where-clauses all resolve; a goal
/// repeated along one derivation path is not explored again.
/// Throws Error("no-instance") or Error("ambiguous-instance").
TraitRefKind resolve_trait_ref(const TranslatedCrate& crate, const GenericParams& params, const TraitGoal& goal,
                               const ResolveOptions& options = {});

/// Number of derivation levels: a clause counts 1, an impl 1 + its deepest
/// where-clause derivation.
std::uint32_t derivation_depth(const TraitRefKind& ref);

/// Replays a derivation: checks that `ref` proves `goal` under `params`.
/// Returns an empty string when it does, otherwise the reason it does not.
std::string verify_derivation(const TranslatedCrate& crate, const GenericParams& params, const TraitGoal& goal,
                              const TraitRefKind& ref);

/// The clause `ref` proves in the context of `params` (for parent and item
/// clause paths, the instantiated clause of the trait); nullopt if ill-formed.
std::optional<TraitGoal> goal_of(const TranslatedCrate& crate, const GenericParams& params, const TraitRefKind& ref);

/// Splits call generics at the container's parameter counts (regions, types,
/// const generics). Throws Error("truncation-underflow").
std::pair<GenericArgs, GenericArgs> split_method_generics(const GenericArgs& full, const GenericParams& container);

/// Rewrites associated types fixed by `params`' type constraints or by the
/// impl they are projected from. Throws Error("normalization-diverged") after
/// 64 rewrites.
Ty normalize_assoc_types(const TranslatedCrate& crate, const Ty& ty, const GenericParams& params);

/// Turns `Trait::method` calls into calls on the resolved instance with the
/// method's own generics, and fills in the trait references of plain function
/// calls. Failures leave the call unchanged and produce a diagnostic.
Diagnostics resolve_calls(TranslatedCrate& crate);

/// A ground trait reference (parent and item clauses of impls included)
/// reduced to the impl that provides it. Throws Error("no-instance").
ImplRef concretize_trait_ref(const TranslatedCrate& crate, const TraitRefKind& ref);

}  // namespace charon
