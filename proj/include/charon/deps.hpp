#pragma once

#include <set>
#include <vector>

#include "charon/ir.hpp"

namespace charon {

/// Every declaration id in the crate, in canonical order
/// (types, functions, trait declarations, trait impls; ascending index).
std::vector<AnyDeclId> all_decl_ids(const TranslatedCrate& crate);

/// Declarations mentioned by the signature, generics, fields, items or body of `id`.
std::set<AnyDeclId> decl_dependencies(const TranslatedCrate& crate, const AnyDeclId& id);

}  // namespace charon
