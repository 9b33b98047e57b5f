#pragma once

// Cleanup passes on CFG bodies and the crate, and the configurable pipeline
// that runs them in a fixed order.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "charon/ir.hpp"

namespace charon {

std::set<std::string> default_panic_functions();

struct PassConfig {
  bool unify_panics = true;
  bool fuse_checked_arith = true;
  bool reconstruct_matches = true;
  bool decode_constants = true;
  bool resolve_calls = true;  // trait resolution at call sites
  bool decl_groups = true;
  std::set<std::string> panic_functions = default_panic_functions();

  static PassConfig none() { return PassConfig{false, false, false, false, false, false, default_panic_functions()}; }
};

/// `t = checked_op a, b; assert t.f1 == false -> K` with `K` starting with
/// `x = use t.f0` becomes `x = op a, b; goto K` (trapping op); `t` is removed.
void fuse_checked_arith(ullbc::Body& body);

/// Calls into the panic set become `abort panic`, `unreachable` becomes
/// `abort ub`, then blocks no longer reachable from the entry are dropped.
void unify_panics(const TranslatedCrate& crate, ullbc::Body& body, const std::set<std::string>& panic_functions);

/// `d = discriminant p; switch d -> [...]` on an enum place becomes a match.
/// On a case value that names no variant the body is left unchanged and a
/// `bad-discriminant` diagnostic is returned.
Diagnostics reconstruct_matches(const TranslatedCrate& crate, ullbc::Body& body);

/// Removes blocks unreachable from the entry, keeping the relative order of
/// the others. Returns the number of removed blocks.
std::size_t prune_unreachable(ullbc::Body& body);

/// Removes a local that no longer occurs in the body, renumbering later ones.
void remove_local(ullbc::Body& body, LocalId id);

/// Byte layout of constants: little-endian scalars at natural width, bool as
/// one byte 00/01, struct/tuple fields and array elements concatenated without
/// padding, enums as a one-byte variant index followed by the variant's fields.
/// Throws Error("encode-error").
std::vector<std::uint8_t> encode_constant(const TranslatedCrate& crate, const ConstantValue& value);

/// Inverse of encode_constant. Throws Error("decode-error").
ConstantValue decode_constant(const TranslatedCrate& crate, const Ty& ty, const std::vector<std::uint8_t>& bytes);

/// Replaces every raw constant in function bodies by its decoded value. A body
/// holding an undecodable constant becomes opaque, with one diagnostic.
Diagnostics decode_constants(TranslatedCrate& crate);

/// Strongly connected components of the declaration dependency graph,
/// dependencies first; ties broken by ascending declaration id.
std::vector<DeclGroup> compute_decl_groups(const TranslatedCrate& crate);

/// Runs the enabled passes in the order: panics, checked arithmetic, match
/// reconstruction, constants, call resolution, declaration groups. Groups come
/// last because resolved calls add dependencies on impls.
Diagnostics run_pipeline(TranslatedCrate& crate, const PassConfig& config = {});

}  // namespace charon
