#pragma once

// Reference interpreters for CFG (ULLBC) and structured (LLBC) bodies. They
// share one value model and one step-counting policy so their outcomes can be
// compared exactly.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "charon/ir.hpp"

namespace charon {

struct PathStep {
  enum class Kind : std::uint8_t { Field, Downcast, Index };
  Kind kind = Kind::Field;
  std::uint32_t n = 0;
  bool operator==(const PathStep&) const = default;
};

/// Address of a (sub)value: a local of a live frame plus a projection path.
struct Pointer {
  std::uint64_t frame = 0;
  std::uint32_t local = 0;
  std::vector<PathStep> path;
  bool operator==(const Pointer&) const = default;
};

struct Value {
  enum class Kind : std::uint8_t { Uninit, Moved, Int, Bool, Aggregate, Ptr };
  Kind kind = Kind::Uninit;
  ScalarKind scalar = ScalarKind::U8;  // Int
  Int128 i = 0;                        // Int
  bool b = false;                      // Bool
  std::optional<VariantId> variant;    // enum aggregates
  std::vector<Value> fields;           // Aggregate
  Pointer ptr;                         // Ptr

  bool operator==(const Value&) const = default;

  static Value integer(ScalarKind k, Int128 v);
  static Value boolean(bool v);
  static Value aggregate(std::vector<Value> fields, std::optional<VariantId> variant = std::nullopt);
};

/// Interpreter value of a constant. Throws Error("type-mismatch") on raw constants.
Value value_of(const ConstantValue& c);
std::string to_string(const Value& v);

struct Outcome {
  enum class Kind : std::uint8_t { Returned, Aborted, OutOfFuel };
  Kind kind = Kind::Returned;
  Value value;                           // Returned
  AbortKind abort = AbortKind::Panic;    // Aborted
  std::uint64_t steps = 0;               // not part of equality

  bool operator==(const Outcome& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Returned) return value == o.value;
    if (kind == Kind::Aborted) return abort == o.abort;
    return true;
  }
};

std::string to_string(const Outcome& o);

/// Steps are statements, calls, branches (switch, if, match, assert), returns
/// and aborts; both interpreters count exactly these. Jumps (goto, break,
/// continue, loop iterations) are free but bounded by `jumps_per_step * fuel`
/// so jump-only cycles still run out of fuel.
struct InterpConfig {
  std::uint64_t fuel = 1'000'000;
  std::uint64_t jumps_per_step = 64;
  std::uint32_t max_call_depth = 256;  // deeper recursion ends as OutOfFuel
  std::set<std::string> panic_functions = {"core::panicking::panic", "core::panicking::panic_fmt",
                                           "std::panic::begin_panic"};
};

/// Runs `body` on `args`. Callees run with the interpreter matching the form
/// of their body. Throws Error with code `use-after-move`, `uninit-read`,
/// `opaque-call` or `type-mismatch`: these are defects of the program under
/// test, not outcomes.
Outcome interp_ullbc(const TranslatedCrate& crate, const ullbc::Body& body, const std::vector<Value>& args,
                     const InterpConfig& config = {});
Outcome interp_llbc(const TranslatedCrate& crate, const llbc::Body& body, const std::vector<Value>& args,
                    const InterpConfig& config = {});
Outcome interp_fun(const TranslatedCrate& crate, FunDeclId fun, const std::vector<Value>& args,
                   const InterpConfig& config = {});

}  // namespace charon
