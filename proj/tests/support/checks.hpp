#pragma once

// Property checks shared by the unit tests and the acceptance driver. Each
// check runs on one program text and adds its findings to a Tally, so callers
// decide population sizes and time limits.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "charon/interp.hpp"
#include "charon/ir.hpp"
#include "gen.hpp"

namespace checks {

struct Tally {
  std::size_t programs = 0;
  std::size_t cases = 0;  // individual comparisons
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> outcomes;  // returned / aborted / out of fuel, from the reference side
  std::vector<std::string> failures;

  void fail(std::string what) { failures.push_back(std::move(what)); }
  bool ok() const { return failures.empty(); }
  /// First few failures, one per line.
  std::string summary(std::size_t max = 5) const;
};

/// Outcome of one run, or the code of the interpreter error it raised.
struct Run {
  std::optional<charon::Outcome> outcome;
  std::string error;
  bool operator==(const Run& o) const { return outcome == o.outcome && error == o.error; }
};
std::string to_string(const Run& r);

Run run_fun(const charon::TranslatedCrate& crate, charon::FunDeclId fun, const std::vector<charon::Value>& args,
            std::uint64_t fuel);

/// Functions with a body whose parameters random_value can produce.
std::vector<charon::FunDeclId> testable_functions(const charon::TranslatedCrate& crate);

/// Twin interpreters: the CFG crate (after the pipeline) against its
/// restructured copy, `inputs` random argument vectors per testable function.
/// Functions that restructuring rejects are reported as failures unless the
/// brute-force oracle confirms the CFG is irreducible.
void twin(const std::string& label, const std::string& text, gen::Rng& rng, int inputs, std::uint64_t fuel,
          Tally& tally);

/// The four body passes, one at a time: semantics preserved (interpreter
/// comparison, a run that only one side finishes is retried on the other with
/// 3F+3 fuel since a pass may merge up to three steps into one) and
/// idempotence. For constant decoding the reference is the same text with raw
/// scalar constants rewritten as literals. Also checks that after the whole
/// pipeline no raw constant or discriminant switch remains and the crate
/// validates.
void pass_soundness(const std::string& label, const std::string& text, gen::Rng& rng, int inputs, std::uint64_t fuel,
                    Tally& tally);

/// `const raw(2a 00): u16` -> `const 42u16`, for scalar types only; nullopt if
/// some raw constant has another type.
std::optional<std::string> inline_raw_scalars(const std::string& text);

/// Blocks ending in `d = discriminant p; switch d` (independent of the pass).
std::size_t discriminant_switches(const charon::TranslatedCrate& crate);

/// Raw constants anywhere in the crate's JSON encoding.
std::size_t raw_constants(const charon::TranslatedCrate& crate);

}  // namespace checks
