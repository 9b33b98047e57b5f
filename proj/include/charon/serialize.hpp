#pragma once

// Versioned JSON encoding of a crate (`.ullbc.json` / `.llbc.json`).
// The format is specified in docs/schema.md.

#include <string>
#include <string_view>

#include "charon/ir.hpp"

namespace charon {

inline constexpr const char* kFormatVersion = "1";

enum class BodyForm { Ullbc, Llbc };

const char* to_string(BodyForm form);

/// Deterministic encoding: two-space indentation, fields in declaration order,
/// trailing newline. Throws std::invalid_argument if a body does not have the
/// requested form (opaque bodies are allowed in both).
std::string to_json(const TranslatedCrate& crate, BodyForm form);

struct JsonOptions {
  bool lenient = false;  // ignore unknown object fields
};

struct LoadedCrate {
  BodyForm form = BodyForm::Ullbc;
  TranslatedCrate crate;
};

/// Error from from_json; `json_path()` locates the offending value
/// (`$.crate.fun_decls[2].body`), empty for malformed documents.
class JsonError : public Error {
 public:
  JsonError(std::string code, std::string message, std::string path)
      : Error(std::move(code), path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& json_path() const { return path_; }

 private:
  std::string path_;
};

/// Inverse of to_json. Throws JsonError with code `malformed-json`,
/// `version-mismatch` or `schema-violation`. The decoded crate is also
/// checked with validate_crate; failures there are schema violations at `$.crate`.
LoadedCrate from_json(std::string_view text, const JsonOptions& options = {});

}  // namespace charon
