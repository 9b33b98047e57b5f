#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace charon {

using Int128 = __int128;

std::string int128_to_string(Int128 v);
/// Parses an optionally signed decimal literal; throws std::invalid_argument.
Int128 int128_from_string(const std::string& text);

/// Strongly typed dense index. Tags are only used to keep ID spaces apart.
template <class Tag>
struct Id {
  std::uint32_t index = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t i) : index(i) {}
  constexpr explicit Id(std::size_t i) : index(static_cast<std::uint32_t>(i)) {}
  constexpr explicit Id(int i) : index(static_cast<std::uint32_t>(i)) {}

  auto operator<=>(const Id&) const = default;
};

using TypeDeclId = Id<struct TypeDeclTag>;
using FunDeclId = Id<struct FunDeclTag>;
using TraitDeclId = Id<struct TraitDeclTag>;
using TraitImplId = Id<struct TraitImplTag>;
using FileId = Id<struct FileTag>;
using ClauseId = Id<struct ClauseTag>;
using VariantId = Id<struct VariantTag>;
using LocalId = Id<struct LocalTag>;
using BlockId = Id<struct BlockTag>;

/// Owning heap cell with value semantics; used to break recursion in the IR.
template <class T>
class Box {
 public:
  Box() : ptr_(std::make_unique<T>()) {}
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(std::make_unique<T>(*other)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  bool operator==(const Box& other) const { return *ptr_ == *other.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

/// 1-based source range.
struct Span {
  FileId file;
  std::uint32_t beg_line = 0;
  std::uint32_t beg_col = 0;
  std::uint32_t end_line = 0;
  std::uint32_t end_col = 0;

  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

std::string to_string(const Span& span);

struct Diagnostic {
  std::string code;
  Span span;
  std::string message;
  std::string item;  // declaration the diagnostic was raised in, if any

  bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

std::string to_string(const Diagnostic& diag);

/// Fatal error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string message, std::optional<Span> span = std::nullopt)
      : std::runtime_error(std::move(message)), code_(std::move(code)), span_(span) {}

  const std::string& code() const { return code_; }
  const std::optional<Span>& span() const { return span_; }

 private:
  std::string code_;
  std::optional<Span> span_;
};

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace charon
