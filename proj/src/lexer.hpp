#pragma once

#include <string>
#include <vector>

#include "charon/support.hpp"

namespace charon::detail {

enum class TokKind { Ident, Word, String, Lifetime, Punct, Eof };

struct Token {
  TokKind kind = TokKind::Eof;
  std::string text;
  Span span;
  std::vector<std::string> comments;  // `//` comments immediately preceding the token

  bool is(const char* punct_or_ident) const {
    return (kind == TokKind::Punct || kind == TokKind::Ident) && text == punct_or_ident;
  }
};

/// Splits MIR-lite source into tokens. Words starting with a digit (integer
/// literals, hex byte runs) are `Word`s. Throws ParseError on stray characters.
std::vector<Token> lex(const std::string& text, FileId file);

}  // namespace charon::detail
