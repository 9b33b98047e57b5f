#include "lexer.hpp"

#include <cctype>

#include "charon/frontend.hpp"

namespace charon::detail {

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

}  // namespace

std::vector<Token> lex(const std::string& text, FileId file) {
  std::vector<Token> out;
  std::vector<std::string> pending_comments;
  std::size_t i = 0;
  std::uint32_t line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      std::size_t end = text.find('\n', i);
      if (end == std::string::npos) end = text.size();
      std::string body = text.substr(i + 2, end - i - 2);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      while (!body.empty() && (body.back() == '\r' || body.back() == ' ')) body.pop_back();
      pending_comments.push_back(body);
      advance(end - i);
      continue;
    }

    Token tok;
    tok.span.file = file;
    tok.span.beg_line = line;
    tok.span.beg_col = col;
    std::size_t start = i;

    if (is_word_char(c)) {
      while (i < text.size() && is_word_char(text[i])) advance(1);
      tok.text = text.substr(start, i - start);
      tok.kind = std::isdigit(static_cast<unsigned char>(c)) != 0 ? TokKind::Word : TokKind::Ident;
    } else if (c == '"') {
      advance(1);
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\') advance(1);
        advance(1);
      }
      if (i >= text.size()) throw ParseError("lex-error", "unterminated string literal", tok.span);
      advance(1);
      tok.text = text.substr(start, i - start);
      tok.kind = TokKind::String;
    } else if (c == '\'') {
      advance(1);
      while (i < text.size() && is_word_char(text[i])) advance(1);
      tok.text = text.substr(start, i - start);
      if (tok.text.size() < 2) throw ParseError("lex-error", "malformed lifetime", tok.span);
      tok.kind = TokKind::Lifetime;
    } else {
      static const char* const kTwoChar[] = {"::", "->", "=="};
      tok.kind = TokKind::Punct;
      for (const char* two : kTwoChar) {
        if (text.compare(i, 2, two) == 0) {
          tok.text = two;
          break;
        }
      }
      if (tok.text.empty()) {
        static const std::string kSingle = "{}()[]<>,;:=.*&#@!+-";
        if (kSingle.find(c) == std::string::npos) {
          throw ParseError("lex-error", std::string("unexpected character '") + c + "'", tok.span);
        }
        tok.text = std::string(1, c);
      }
      advance(tok.text.size());
    }
    tok.span.end_line = line;
    tok.span.end_col = col;
    tok.comments = std::move(pending_comments);
    pending_comments.clear();
    out.push_back(std::move(tok));
  }

  Token eof;
  eof.kind = TokKind::Eof;
  eof.span = Span{file, line, col, line, col};
  out.push_back(std::move(eof));
  return out;
}

}  // namespace charon::detail
