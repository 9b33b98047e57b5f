#pragma once

// Constant-time taint analysis over structured (LLBC) bodies. Parameters
// marked `#[secret]` are the sources; branching on, indexing with, or dividing
// by a secret value is a violation.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "charon/ir.hpp"

namespace charon {

/// Taint of a value and, field by field, of its parts. `rest` covers the value
/// itself and every part without an explicit child. Child keys are field
/// indices (>= 0) and, for enum variants, `-(variant + 1)`.
struct TaintTree {
  bool rest = false;
  std::map<std::int64_t, TaintTree> children;

  static TaintTree leaf(bool secret) { return TaintTree{secret, {}}; }

  bool any() const;
  /// Part `key`; an absent child inherits `rest`.
  TaintTree child(std::int64_t key) const;
  bool operator==(const TaintTree&) const = default;
};

/// Least upper bound, normalized (children equal to `leaf(rest)` dropped).
TaintTree join(const TaintTree& a, const TaintTree& b);
/// Collapses every node deeper than `depth` into the join of its subtree.
TaintTree truncate(const TaintTree& t, std::uint32_t depth);
/// `public`, `secret`, or `{rest; key: tree; ...}` with `.N` fields and `#N` variants.
std::string to_string(const TaintTree& t);

enum class OpaquePolicy {
  TaintEverything,  // result and everything reachable through reference arguments become secret
  Error,            // Error("missing-body")
};

struct TaintConfig {
  std::uint32_t max_depth = 4;
  std::set<BinOp> variable_latency = {BinOp::Div, BinOp::Rem};
  OpaquePolicy opaque = OpaquePolicy::TaintEverything;
};

struct Violation {
  std::string kind;      // branch, index, div, rem (operator name for other variable-latency ops)
  Span span;
  std::string function;
  std::string message;
  bool operator==(const Violation&) const = default;
};

/// Result of analyzing one function under one input context.
struct FnSummary {
  FunDeclId fun;
  std::vector<TaintTree> inputs;
  TaintTree output;
  std::vector<bool> writes_through;  // per parameter: secret stored through it (references)
  std::size_t violations = 0;        // distinct violations found in this context
  bool operator==(const FnSummary&) const = default;
};

struct TaintReport {
  std::vector<Violation> violations;  // deduplicated, sorted by span, then kind, then function
  std::vector<FnSummary> summaries;   // sorted by function id, then inputs
};

/// Analyzes every function with a structured body, each under the context
/// given by its `#[secret]` parameters, plus every calling context reached
/// from those. Recursive calls are solved by ascending iteration on summaries.
TaintReport analyze_taint(const TranslatedCrate& crate, const TaintConfig& config = {});

std::string report_text(const TranslatedCrate& crate, const TaintReport& report);
std::string report_json(const TranslatedCrate& crate, const TaintReport& report);

}  // namespace charon
