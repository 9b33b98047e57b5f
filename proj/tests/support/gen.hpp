#pragma once

// Random inputs for property tests: CFG programs, trait environments, crates,
// constants and interpreter arguments. Programs are produced as MIR-lite text
// so a failing case can be dumped and replayed with the CLI.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "charon/interp.hpp"
#include "charon/ir.hpp"
#include "charon/traits.hpp"

namespace gen {

using Rng = std::mt19937_64;

struct CfgOptions {
  int max_blocks = 12;
  // Chance that a jump goes backwards (creating a loop).
  double back_edge = 0.25;
  std::string name = "f";
  // Also declare `Opt` and the panic function (once per crate).
  bool prelude = true;
};

/// Text of a crate whose function `f` has a random CFG over integer locals, with the patterns the cleanup passes look for (checked arithmetic,
/// panic calls, discriminant switches, raw constants) mixed in.
std::string random_cfg_program(Rng& rng, const CfgOptions& options = {});

/// Same, but resampled until the CFG of `f` is reducible.
std::string random_reducible_program(Rng& rng, const CfgOptions& options = {});

/// A random value of type `ty` (scalars, bool, tuples, arrays, non-generic and
/// instantiated ADTs). Integers favour small numbers and range ends.
charon::Value random_value(Rng& rng, const charon::TranslatedCrate& crate, const charon::Ty& ty);

/// Whether random_value can produce values of `ty` (no references, no type variables).
bool is_generatable(const charon::TranslatedCrate& crate, const charon::Ty& ty);

/// A random constant of type `ty`; enums pick a random variant.
charon::ConstantValue random_constant(Rng& rng, const charon::TranslatedCrate& crate, const charon::Ty& ty);

/// A crate with random struct and enum declarations (some generic) to draw
/// constant types from.
std::string random_type_decls(Rng& rng);

/// A random type built from `crate`'s non-opaque ADTs, scalars, bool, tuples
/// and arrays, nested at most `depth` levels.
charon::Ty random_type(Rng& rng, const charon::TranslatedCrate& crate, int depth);

/// Random trait environment: up to 6 traits (some with a parent or an extra
/// parameter), up to 6 impls over the opaque constructors `Box` and `Pair`
/// (type ids 0 and 1), and a function `f` whose where-clauses are the local
/// assumptions.
std::string random_trait_env(Rng& rng);

/// A goal for random_trait_env's `f`: a random trait applied to random types built
/// from the scalars, the type constructors and `f`'s parameters.
charon::TraitGoal random_goal(Rng& rng, const charon::TranslatedCrate& crate);

/// A crate exercising every declaration kind: type decls, a trait environment
/// and a few CFG functions.
std::string random_crate(Rng& rng);

}  // namespace gen
