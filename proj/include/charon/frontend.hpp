#pragma once

// Textual front end: the MIR-lite language (`.mirl`) and its printer.
// The grammar is documented in docs/grammar.md.

#include <string>
#include <vector>

#include "charon/ir.hpp"

namespace charon {

struct SourceFile {
  std::string name;
  std::string text;
};

/// Syntax or name-resolution failure. `expected` lists the tokens that would
/// have been accepted (empty for resolution errors).
class ParseError : public Error {
 public:
  ParseError(std::string code, std::string message, Span span, std::vector<std::string> expected = {})
      : Error(std::move(code), std::move(message), span), expected_(std::move(expected)) {}

  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::vector<std::string> expected_;
};

/// Parses one crate made of `files`; bodies come out in CFG (ULLBC) form with
/// raw constants left undecoded. Throws ParseError.
TranslatedCrate parse_crate(const std::vector<SourceFile>& files, const std::string& crate_name = "crate");
TranslatedCrate parse_crate(const std::string& text, const std::string& crate_name = "crate");

/// One constant in the `constant` syntax, e.g. `Option<u32>::Some(3u32)`;
/// type names refer to `crate`. Throws ParseError.
ConstantValue parse_constant(const TranslatedCrate& crate, const std::string& text);

/// Canonical text for the whole crate (declarations in id order). CFG bodies
/// print as valid MIR-lite; structured bodies use the same statement syntax
/// with `if`/`loop`/`match` blocks and are for reading only.
std::string pretty_print(const TranslatedCrate& crate);

std::string print_ty(const TranslatedCrate& crate, const Ty& ty);
std::string print_trait_ref(const TranslatedCrate& crate, const TraitRefKind& ref);
std::string print_constant(const TranslatedCrate& crate, const ConstantValue& value);
std::string print_fun(const TranslatedCrate& crate, const FunDecl& fun);

}  // namespace charon
