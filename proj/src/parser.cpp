#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "charon/frontend.hpp"
#include "lexer.hpp"

namespace charon {

namespace {

using detail::Token;
using detail::TokKind;

// What the pre-scan learns about a trait before anything is parsed, enough
// to resolve `T::Item` shorthands during the main pass.
struct TraitSkeleton {
  std::vector<std::string> assoc_types;
  std::vector<std::string> parents;
};

struct Binder {
  GenericParams* params = nullptr;
  std::optional<TraitDeclId> self_trait;  // set on a trait's own binder
};

enum class ItemKind { Struct, Enum, Opaque, Trait, Impl, Fun };

struct ItemLoc {
  std::size_t file = 0;
  std::size_t pos = 0;  // first token of the item (attributes included)
  ItemKind kind = ItemKind::Fun;
  std::uint32_t id = 0;
};

struct PendingBody {
  FunDeclId fun;
  std::size_t file = 0;
  std::size_t pos = 0;  // at `{`
  std::vector<Local> params;
};

struct BlockRef {
  std::uint32_t index;
  Span span;
};

class Parser {
 public:
  Parser(const std::vector<SourceFile>& files, std::string crate_name) {
    crate_.crate_name = std::move(crate_name);
    for (std::size_t f = 0; f < files.size(); ++f) {
      crate_.files.push_back(File{files[f].name});
      tokens_.push_back(detail::lex(files[f].text, FileId(f)));
    }
  }

  // Parses a standalone constant whose types refer to `crate`'s declarations.
  Parser(const TranslatedCrate& crate, const std::string& text) : crate_(crate) {
    crate_.files.push_back(File{"<constant>"});
    file_ = crate_.files.size() - 1;
    tokens_.resize(file_);
    tokens_.push_back(detail::lex(text, FileId(file_)));
    for (const auto& d : crate_.type_decls) type_names_.emplace(d.meta.name, d.id);
    for (const auto& d : crate_.trait_decls) trait_names_.emplace(d.meta.name, d.id);
    for (const auto& d : crate_.trait_impls) impl_names_.emplace(d.meta.name, d.id);
    for (const auto& d : crate_.fun_decls) fun_names_.emplace(d.meta.name, d.id);
  }

  ConstantValue run_constant() {
    Span start = peek().span;
    ConstantValue c = parse_constant();
    if (peek().kind != TokKind::Eof) fail({"end of input"});
    // parse_crate gets this from validation; a lone constant is checked here
    std::function<void(const ConstantValue&)> check = [&](const ConstantValue& v) {
      if (const auto* s = std::get_if<ScalarConst>(&v.kind)) {
        const auto* st = v.ty.as<ScalarTy>();
        if (st != nullptr && !scalar_fits(st->kind, s->value))
          fail_at("scalar-overflow", int128_to_string(s->value) + " does not fit " + to_string(st->kind), start);
      }
      if (const auto* a = std::get_if<AdtConst>(&v.kind))
        for (const auto& f : a->fields) check(f);
    };
    check(c);
    return c;
  }

  TranslatedCrate run() {
    for (std::size_t f = 0; f < tokens_.size(); ++f) prescan(f);
    crate_.type_decls.resize(type_names_.size());
    crate_.trait_decls.resize(trait_names_.size());
    crate_.trait_impls.resize(impl_names_.size());
    crate_.fun_decls.resize(fun_names_.size());
    for (const auto& item : items_) parse_item(item);
    for (auto& body : pending_) parse_body(body);
    auto diags = validate_crate(crate_);
    if (!diags.empty()) throw ParseError(diags[0].code, diags[0].message, diags[0].span);
    return std::move(crate_);
  }

 private:
  // -------------------------------------------------------------------------
  // Token access

  const Token& peek(std::size_t k = 0) const {
    const auto& toks = tokens_[file_];
    return toks[std::min(pos_ + k, toks.size() - 1)];
  }

  const Token& next() {
    const Token& t = peek();
    if (t.kind != TokKind::Eof) ++pos_;
    last_end_ = t.span;
    return t;
  }

  bool at(const char* text) const { return peek().is(text); }

  bool accept(const char* text) {
    if (!at(text)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string msg = "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += "`" + expected[i] + "`";
    }
    msg += ", found " + (t.kind == TokKind::Eof ? std::string("end of file") : "`" + t.text + "`");
    throw ParseError("syntax-error", msg, t.span, std::move(expected));
  }

  [[noreturn]] void fail_at(const std::string& code, const std::string& msg, const Span& span) const {
    throw ParseError(code, msg, span);
  }

  const Token& expect(const char* text) {
    if (!at(text)) fail({text});
    return next();
  }

  std::string expect_ident(const char* what = "identifier") {
    if (peek().kind != TokKind::Ident) fail({what});
    return next().text;
  }

  Span span_from(const Span& begin) const {
    Span s = begin;
    s.end_line = last_end_.end_line;
    s.end_col = last_end_.end_col;
    return s;
  }

  std::uint64_t expect_uint(const char* what = "integer") {
    if (peek().kind != TokKind::Word) fail({what});
    const Token& t = next();
    try {
      Int128 v = int128_from_string(t.text);
      if (v < 0 || v > static_cast<Int128>(UINT64_MAX)) throw std::invalid_argument("range");
      return static_cast<std::uint64_t>(v);
    } catch (const std::invalid_argument&) {
      fail_at("syntax-error", "malformed integer `" + t.text + "`", t.span);
    }
  }

  // -------------------------------------------------------------------------
  // Pre-scan: assign ids in source order and record trait skeletons.

  void skip_balanced(const char* open, const char* close) {
    int depth = 0;
    do {
      if (peek().kind == TokKind::Eof) fail({close});
      if (at(open)) ++depth;
      if (at(close)) --depth;
      next();
    } while (depth > 0);
  }

  void skip_attributes() {
    while (at("#")) {
      next();
      if (!at("[")) fail({"["});
      skip_balanced("[", "]");
    }
  }

  // Skips to the end of the item: a `;` or a balanced `{...}` at nesting level 0.
  void skip_item_rest() {
    int depth = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokKind::Eof) fail({";", "{"});
      if (t.is("(") || t.is("[")) ++depth;
      if (t.is(")") || t.is("]")) --depth;
      if (depth == 0 && t.is(";")) {
        next();
        return;
      }
      if (depth == 0 && t.is("{")) {
        skip_balanced("{", "}");
        return;
      }
      next();
    }
  }

  template <class Id>
  Id declare(std::map<std::string, Id>& table, const std::string& name, const Span& span, const char* ns) {
    if (table.count(name)) fail_at("duplicate-name", std::string(ns) + " `" + name + "` is declared twice", span);
    Id id(static_cast<std::uint32_t>(table.size()));
    table.emplace(name, id);
    return id;
  }

  std::string parse_path_name() {
    std::string name = expect_ident("name");
    while (at("::") && peek(1).kind == TokKind::Ident) {
      next();
      name += "::" + next().text;
    }
    return name;
  }

  void prescan(std::size_t file) {
    file_ = file;
    pos_ = 0;
    while (peek().kind != TokKind::Eof) {
      ItemLoc loc;
      loc.file = file;
      loc.pos = pos_;
      skip_attributes();
      const Token kw = peek();
      if (kw.is("struct") || kw.is("enum") || kw.is("type")) {
        next();
        std::string name = expect_ident("type name");
        loc.kind = kw.is("struct") ? ItemKind::Struct : kw.is("enum") ? ItemKind::Enum : ItemKind::Opaque;
        loc.id = declare(type_names_, name, kw.span, "type").index;
      } else if (kw.is("trait")) {
        next();
        std::string name = expect_ident("trait name");
        loc.kind = ItemKind::Trait;
        loc.id = declare(trait_names_, name, kw.span, "trait").index;
        skeletons_.push_back(scan_trait_skeleton());
      } else if (kw.is("impl")) {
        next();
        std::string name = expect_ident("impl name");
        loc.kind = ItemKind::Impl;
        loc.id = declare(impl_names_, name, kw.span, "impl").index;
      } else if (kw.is("fn")) {
        next();
        std::string name = parse_path_name();
        loc.kind = ItemKind::Fun;
        loc.id = declare(fun_names_, name, kw.span, "function").index;
      } else {
        fail({"struct", "enum", "type", "trait", "impl", "fn"});
      }
      skip_item_rest();
      items_.push_back(loc);
    }
  }

  TraitSkeleton scan_trait_skeleton() {
    TraitSkeleton sk;
    std::size_t save = pos_;
    if (at("<")) skip_balanced("<", ">");
    if (accept(":")) {
      while (peek().kind == TokKind::Ident && !at("where")) {
        sk.parents.push_back(next().text);
        if (at("<")) skip_balanced("<", ">");
        if (!accept("+")) break;
      }
    }
    while (!at("{") && peek().kind != TokKind::Eof) next();
    if (accept("{")) {
      int depth = 1;
      while (depth > 0 && peek().kind != TokKind::Eof) {
        if (depth == 1 && at("type") && peek(1).kind == TokKind::Ident) {
          next();
          sk.assoc_types.push_back(next().text);
          continue;
        }
        if (at("{")) ++depth;
        if (at("}")) --depth;
        next();
      }
    }
    pos_ = save;
    return sk;
  }

  // -------------------------------------------------------------------------
  // Generics, types and trait references

  std::optional<TypeVar> lookup_type_var(const std::string& name) const {
    for (std::size_t d = 0; d < binders_.size(); ++d) {
      const auto& params = *binders_[binders_.size() - 1 - d].params;
      for (std::size_t i = 0; i < params.types.size(); ++i)
        if (params.types[i].name == name)
          return TypeVar{static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(i)};
    }
    return std::nullopt;
  }

  std::optional<std::uint32_t> lookup_const_var(const std::string& name) const {
    if (binders_.empty()) return std::nullopt;
    const auto& params = *binders_.back().params;
    for (std::size_t i = 0; i < params.const_generics.size(); ++i)
      if (params.const_generics[i].name == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
  }

  TraitDeclId lookup_trait(const std::string& name, const Span& span) const {
    auto it = trait_names_.find(name);
    if (it == trait_names_.end()) fail_at("unknown-name", "unknown trait `" + name + "`", span);
    return it->second;
  }

  // Resolves `self_ty::item` by searching, breadth first, the trait instances
  // known for `self_ty` and their super traits.
  std::optional<TraitRefKind> find_assoc_owner(const Ty& self_ty, const std::string& item) const {
    std::deque<std::pair<TraitRefKind, TraitDeclId>> queue;
    for (std::size_t d = 0; d < binders_.size(); ++d) {
      const auto& b = binders_[binders_.size() - 1 - d];
      if (b.self_trait && self_ty == Ty::var(0, static_cast<std::uint32_t>(d)))
        queue.emplace_back(TraitRefKind::self(), *b.self_trait);
    }
    if (!binders_.empty()) {
      for (const auto& clause : binders_.back().params->trait_clauses)
        if (!clause.args.types.empty() && clause.args.types[0] == self_ty)
          queue.emplace_back(TraitRefKind::clause(clause.id), clause.trait);
    }
    int steps = 0;
    while (!queue.empty() && steps++ < 256) {
      auto [path, trait] = queue.front();
      queue.pop_front();
      const auto& sk = skeletons_[trait.index];
      if (std::find(sk.assoc_types.begin(), sk.assoc_types.end(), item) != sk.assoc_types.end())
        return path;
      for (std::size_t i = 0; i < sk.parents.size(); ++i) {
        auto it = trait_names_.find(sk.parents[i]);
        if (it != trait_names_.end())
          queue.emplace_back(TraitRefKind::parent(path, static_cast<std::uint32_t>(i)), it->second);
      }
    }
    return std::nullopt;
  }

  void parse_generic_params(GenericParams& params) {
    if (!accept("<")) return;
    while (!at(">")) {
      if (peek().kind == TokKind::Lifetime) {
        params.regions.push_back(RegionVar{next().text.substr(1)});
      } else if (accept("const")) {
        std::string name = expect_ident();
        expect(":");
        params.const_generics.push_back(ConstGenericVar{name, parse_scalar_kind()});
      } else {
        params.types.push_back(TypeVarDecl{expect_ident("type parameter")});
      }
      if (!accept(",")) break;
    }
    expect(">");
  }

  ScalarKind parse_scalar_kind() {
    const Token& t = peek();
    auto k = scalar_kind_from_string(t.text);
    if (t.kind != TokKind::Ident || !k) fail({"u8", "u16", "u32", "u64", "i8", "i16", "i32", "i64"});
    next();
    return *k;
  }

  // After `<`; also consumes the optional `[trait refs]` suffix.
  GenericArgs parse_generic_args_after_open() {
    GenericArgs args;
    while (!at(">")) {
      if (peek().kind == TokKind::Lifetime) {
        args.regions.push_back(next().text.substr(1));
      } else if (peek().kind == TokKind::Word || (at("-") && peek(1).kind == TokKind::Word)) {
        auto [value, kind] = parse_int_literal(ScalarKind::U64);
        args.const_generics.emplace_back(ConstGenericValue{kind, value});
      } else if (peek().kind == TokKind::Ident && lookup_const_var(peek().text) &&
                 !lookup_type_var(peek().text)) {
        args.const_generics.emplace_back(ConstGenericVarRef{*lookup_const_var(next().text)});
      } else {
        args.types.push_back(parse_ty());
      }
      if (!accept(",")) break;
    }
    expect(">");
    parse_trait_ref_list(args);
    return args;
  }

  void parse_trait_ref_list(GenericArgs& args) {
    if (!accept("[")) return;
    while (!at("]")) {
      args.trait_refs.push_back(parse_trait_ref());
      if (!accept(",")) break;
    }
    expect("]");
  }

  GenericArgs parse_opt_generic_args() {
    if (accept("<")) return parse_generic_args_after_open();
    GenericArgs args;
    parse_trait_ref_list(args);
    return args;
  }

  TraitRefKind parse_trait_ref() {
    TraitRefKind ref;
    if (accept("@")) {
      ref = TraitRefKind::clause(ClauseId(static_cast<std::uint32_t>(expect_uint("clause index"))));
    } else if (accept("Self")) {
      ref = TraitRefKind::self();
    } else if (accept("impl")) {
      Span s = peek().span;
      std::string name = expect_ident("impl name");
      auto it = impl_names_.find(name);
      if (it == impl_names_.end()) fail_at("unknown-name", "unknown impl `" + name + "`", s);
      ref = TraitRefKind::impl(it->second, parse_opt_generic_args());
    } else {
      fail({"@", "Self", "impl"});
    }
    while (at(".") && (peek(1).is("parent") || peek(1).is("item"))) {
      next();
      if (accept("parent")) {
        expect("(");
        auto idx = static_cast<std::uint32_t>(expect_uint());
        expect(")");
        ref = TraitRefKind::parent(std::move(ref), idx);
      } else {
        next();
        expect("(");
        std::string item = expect_ident("associated type");
        expect(",");
        auto idx = static_cast<std::uint32_t>(expect_uint());
        expect(")");
        ref = TraitRefKind::item_clause(std::move(ref), item, idx);
      }
    }
    return ref;
  }

  Ty parse_ty() {
    const Token& t = peek();
    if (accept("&")) {
      std::string region = "_";
      if (peek().kind == TokKind::Lifetime) region = next().text.substr(1);
      Mutability mut = accept("mut") ? Mutability::Mut : Mutability::Shared;
      return Ty{RefTy{region, Box<Ty>(parse_ty()), mut}};
    }
    if (accept("(")) {
      std::vector<Ty> elems;
      while (!at(")")) {
        elems.push_back(parse_ty());
        if (!accept(",")) break;
      }
      expect(")");
      return Ty::tuple(std::move(elems));
    }
    if (accept("[")) {
      Ty elem = parse_ty();
      expect(";");
      auto len = expect_uint("array length");
      expect("]");
      return Ty{ArrayTy{Box<Ty>(std::move(elem)), len}};
    }
    if (accept("<")) {
      TraitRefKind ref = parse_trait_ref();
      expect(">");
      expect("::");
      return Ty{AssocTy{Box<TraitRefKind>(std::move(ref)), expect_ident("associated type")}};
    }
    if (t.kind != TokKind::Ident) fail({"type"});
    std::string name = next().text;
    if (auto k = scalar_kind_from_string(name)) return Ty::scalar(*k);
    if (name == "bool") return Ty::boolean();
    if (auto var = lookup_type_var(name)) {
      Ty ty{*var};
      while (at("::") && peek(1).kind == TokKind::Ident) {
        next();
        const Token& item_tok = next();
        auto owner = find_assoc_owner(ty, item_tok.text);
        if (!owner) fail_at("unknown-name", "no trait bound provides `" + name + "::" + item_tok.text + "`", item_tok.span);
        ty = Ty{AssocTy{Box<TraitRefKind>(std::move(*owner)), item_tok.text}};
      }
      return ty;
    }
    auto it = type_names_.find(name);
    if (it == type_names_.end()) fail_at("unknown-name", "unknown type `" + name + "`", t.span);
    return Ty::adt(it->second, parse_opt_generic_args());
  }

  // `Name<args>` (after the self type) for a bound `self_ty: Name<args>`.
  TraitClause parse_bound(const Ty& self_ty, ClauseId id) {
    Span s = peek().span;
    TraitClause clause;
    clause.id = id;
    clause.trait = lookup_trait(expect_ident("trait name"), s);
    clause.args = parse_opt_generic_args();
    clause.args.types.insert(clause.args.types.begin(), self_ty);
    return clause;
  }

  // Finds a `where` at nesting level 0 before the next `{` or `;`.
  std::optional<std::size_t> find_where() const {
    int depth = 0;
    for (std::size_t k = pos_; k < tokens_[file_].size(); ++k) {
      const Token& t = tokens_[file_][k];
      if (t.kind == TokKind::Eof) break;
      if (t.is("(") || t.is("[") || t.is("<")) ++depth;
      if (t.is(")") || t.is("]") || t.is(">")) --depth;
      if (depth == 0 && (t.is("{") || t.is(";"))) break;
      if (depth == 0 && t.is("where")) return k;
    }
    return std::nullopt;
  }

  void parse_where_clauses(GenericParams& params) {
    if (!accept("where")) return;
    while (!at("{") && !at(";") && peek().kind != TokKind::Eof) {
      if (peek().kind == TokKind::Lifetime) {
        std::string longer = next().text.substr(1);
        expect(":");
        if (peek().kind != TokKind::Lifetime) fail({"lifetime"});
        params.regions_outlive.push_back(RegionOutlives{longer, next().text.substr(1)});
      } else {
        Span s = peek().span;
        Ty lhs = parse_ty();
        if (accept("=")) {
          const auto* assoc = lhs.as<AssocTy>();
          if (assoc == nullptr) fail_at("syntax-error", "left side of a type equality must be an associated type", s);
          params.trait_type_constraints.push_back(TraitTypeConstraint{*assoc->trait_ref, assoc->item, parse_ty()});
        } else {
          expect(":");
          if (peek().kind == TokKind::Lifetime) {
            params.types_outlive.push_back(TypeOutlives{lhs, next().text.substr(1)});
          } else {
            do {
              params.trait_clauses.push_back(parse_bound(lhs, ClauseId(params.trait_clauses.size())));
            } while (accept("+"));
          }
        }
      }
      if (!accept(",")) break;
    }
  }

  // Parses `where` clauses that follow the current position first, so that
  // earlier signature types may refer to them; returns the resume position.
  std::optional<std::size_t> parse_where_ahead(GenericParams& params) {
    auto where = find_where();
    if (!where) return std::nullopt;
    std::size_t save = pos_;
    pos_ = *where;
    parse_where_clauses(params);
    std::size_t after = pos_;
    pos_ = save;
    return after;
  }

  // -------------------------------------------------------------------------
  // Items

  std::vector<std::string> parse_attributes() {
    std::vector<std::string> attrs;
    while (accept("#")) {
      expect("[");
      std::string text;
      int depth = 1;
      while (true) {
        if (peek().kind == TokKind::Eof) fail({"]"});
        if (at("[")) ++depth;
        if (at("]") && --depth == 0) break;
        text += next().text;
      }
      expect("]");
      attrs.push_back(text);
    }
    return attrs;
  }

  void parse_item(const ItemLoc& loc) {
    file_ = loc.file;
    pos_ = loc.pos;
    binders_.clear();
    ItemMeta meta;
    meta.span = peek().span;
    meta.attributes = parse_attributes();
    switch (loc.kind) {
      case ItemKind::Struct:
      case ItemKind::Enum:
      case ItemKind::Opaque: parse_type_decl(TypeDeclId(loc.id), std::move(meta)); break;
      case ItemKind::Trait: parse_trait_decl(TraitDeclId(loc.id), std::move(meta)); break;
      case ItemKind::Impl: parse_trait_impl(TraitImplId(loc.id), std::move(meta)); break;
      case ItemKind::Fun: parse_fun_decl(FunDeclId(loc.id), std::move(meta)); break;
    }
  }

  void parse_type_decl(TypeDeclId id, ItemMeta meta) {
    TypeDecl& decl = crate_.type_decls[id.index];
    decl.id = id;
    const Token kw = next();
    meta.name = next().text;
    parse_generic_params(decl.generics);
    binders_.push_back(Binder{&decl.generics, std::nullopt});
    parse_where_clauses(decl.generics);
    if (kw.is("type")) {
      decl.kind = OpaqueKind{};
      expect(";");
    } else if (kw.is("struct")) {
      StructKind s;
      expect("{");
      std::set<std::string> names;
      while (!at("}")) {
        Span fs = peek().span;
        Field f;
        f.name = expect_ident("field name");
        if (!names.insert(f.name).second) fail_at("duplicate-name", "field `" + f.name + "` declared twice", fs);
        expect(":");
        f.ty = parse_ty();
        s.fields.push_back(std::move(f));
        if (!accept(",")) break;
      }
      expect("}");
      decl.kind = std::move(s);
    } else {
      EnumKind e;
      expect("{");
      std::set<std::string> names;
      Int128 next_discr = 0;
      while (!at("}")) {
        Span vs = peek().span;
        Variant v;
        v.name = expect_ident("variant name");
        if (!names.insert(v.name).second) fail_at("duplicate-name", "variant `" + v.name + "` declared twice", vs);
        if (accept("(")) {
          while (!at(")")) {
            v.fields.push_back(Field{"f" + std::to_string(v.fields.size()), parse_ty()});
            if (!accept(",")) break;
          }
          expect(")");
        }
        v.discriminant = next_discr;
        if (accept("=")) v.discriminant = parse_int_literal(ScalarKind::I64).first;
        next_discr = v.discriminant + 1;
        e.variants.push_back(std::move(v));
        if (!accept(",")) break;
      }
      expect("}");
      decl.kind = std::move(e);
    }
    meta.span = span_from(meta.span);
    decl.meta = std::move(meta);
  }

  void parse_trait_decl(TraitDeclId id, ItemMeta meta) {
    TraitDecl& decl = crate_.trait_decls[id.index];
    decl.id = id;
    expect("trait");
    meta.name = next().text;
    decl.generics.types.push_back(TypeVarDecl{"Self"});
    parse_generic_params(decl.generics);
    binders_.push_back(Binder{&decl.generics, id});
    Ty self_ty = Ty::var(0);
    if (accept(":")) {
      do {
        decl.parent_clauses.push_back(parse_bound(self_ty, ClauseId(decl.parent_clauses.size())));
      } while (accept("+"));
    }
    parse_where_clauses(decl.generics);
    expect("{");
    std::set<std::string> names;
    while (!at("}")) {
      Span is = peek().span;
      if (accept("type")) {
        AssocTypeDecl assoc;
        assoc.name = expect_ident("associated type");
        if (!names.insert("type " + assoc.name).second)
          fail_at("duplicate-name", "associated type `" + assoc.name + "` declared twice", is);
        if (accept(":")) {
          Ty item_ty{AssocTy{Box<TraitRefKind>(TraitRefKind::self()), assoc.name}};
          do {
            assoc.clauses.push_back(parse_bound(item_ty, ClauseId(assoc.clauses.size())));
          } while (accept("+"));
        }
        expect(";");
        decl.assoc_types.push_back(std::move(assoc));
      } else if (accept("fn")) {
        TraitMethodDecl method;
        method.name = expect_ident("method name");
        if (!names.insert("fn " + method.name).second)
          fail_at("duplicate-name", "method `" + method.name + "` declared twice", is);
        parse_generic_params(method.sig.generics);
        binders_.push_back(Binder{&method.sig.generics, std::nullopt});
        auto resume = parse_where_ahead(method.sig.generics);
        parse_signature_rest(method.sig, nullptr);
        if (resume) pos_ = *resume;
        binders_.pop_back();
        expect(";");
        decl.methods.push_back(std::move(method));
      } else {
        fail({"type", "fn", "}"});
      }
    }
    expect("}");
    meta.span = span_from(meta.span);
    decl.meta = std::move(meta);
  }

  // `(params) -> ty`, stopping before `where`, `{` or `;`.
  void parse_signature_rest(FunSig& sig, std::vector<Local>* params) {
    expect("(");
    std::set<std::string> names;
    while (!at(")")) {
      Local local;
      local.attributes = parse_attributes();
      Span ps = peek().span;
      local.name = expect_ident("parameter name");
      if (local.name != "_" && !names.insert(local.name).second)
        fail_at("duplicate-name", "parameter `" + local.name + "` declared twice", ps);
      expect(":");
      local.ty = parse_ty();
      sig.inputs.push_back(local.ty);
      if (params != nullptr) params->push_back(std::move(local));
      if (!accept(",")) break;
    }
    expect(")");
    sig.output = accept("->") ? parse_ty() : Ty::unit();
  }

  void parse_trait_impl(TraitImplId id, ItemMeta meta) {
    TraitImpl& impl = crate_.trait_impls[id.index];
    impl.id = id;
    expect("impl");
    meta.name = next().text;
    parse_generic_params(impl.generics);
    binders_.push_back(Binder{&impl.generics, std::nullopt});
    auto resume = parse_where_ahead(impl.generics);
    expect(":");
    Span ts = peek().span;
    impl.trait = lookup_trait(expect_ident("trait name"), ts);
    GenericArgs args = parse_opt_generic_args();
    expect("for");
    args.types.insert(args.types.begin(), parse_ty());
    impl.trait_args = std::move(args);
    if (resume) pos_ = *resume;
    expect("{");
    while (!at("}")) {
      if (accept("type")) {
        ImplAssocType assoc;
        assoc.name = expect_ident("associated type");
        expect("=");
        assoc.ty = parse_ty();
        expect(";");
        impl.assoc_types.push_back(std::move(assoc));
      } else if (accept("fn")) {
        ImplMethod m;
        m.name = expect_ident("method name");
        expect("=");
        Span fs = peek().span;
        std::string fname = parse_path_name();
        auto it = fun_names_.find(fname);
        if (it == fun_names_.end()) fail_at("unknown-name", "unknown function `" + fname + "`", fs);
        m.fun = it->second;
        expect(";");
        impl.methods.push_back(std::move(m));
      } else {
        fail({"type", "fn", "}"});
      }
    }
    expect("}");
    meta.span = span_from(meta.span);
    impl.meta = std::move(meta);
  }

  void parse_fun_decl(FunDeclId id, ItemMeta meta) {
    FunDecl& decl = crate_.fun_decls[id.index];
    decl.id = id;
    expect("fn");
    meta.name = parse_path_name();
    parse_generic_params(decl.signature.generics);
    binders_.push_back(Binder{&decl.signature.generics, std::nullopt});
    auto resume = parse_where_ahead(decl.signature.generics);
    std::vector<Local> params;
    parse_signature_rest(decl.signature, &params);
    if (resume) pos_ = *resume;
    if (accept(";")) {
      decl.body = OpaqueBody{};
    } else {
      if (!at("{")) fail({"{", ";", "where"});
      std::size_t body_pos = pos_;
      skip_balanced("{", "}");
      if (meta.has_attribute("charon::opaque")) {
        decl.body = OpaqueBody{};
      } else {
        pending_.push_back(PendingBody{id, file_, body_pos, std::move(params)});
      }
    }
    meta.span = span_from(meta.span);
    decl.meta = std::move(meta);
  }

  // -------------------------------------------------------------------------
  // Bodies

  void parse_body(PendingBody& pending) {
    file_ = pending.file;
    pos_ = pending.pos;
    FunDecl& decl = crate_.fun_decls[pending.fun.index];
    binders_.clear();
    binders_.push_back(Binder{&decl.signature.generics, std::nullopt});

    ullbc::Body body;
    Span begin = peek().span;
    expect("{");
    body.locals.push_back(Local{LocalId(0), "ret", decl.signature.output, {}});
    local_names_.clear();
    local_names_["ret"] = LocalId(0);
    for (auto& p : pending.params) {
      LocalId lid(body.locals.size());
      if (p.name != "_") local_names_[p.name] = lid;
      p.id = lid;
      body.locals.push_back(std::move(p));
    }
    body.arg_count = pending.params.size();
    while (at("let")) {
      next();
      accept("mut");
      Span ls = peek().span;
      std::string name = expect_ident("local name");
      if (local_names_.count(name)) fail_at("duplicate-name", "local `" + name + "` declared twice", ls);
      expect(":");
      Ty ty = parse_ty();
      expect(";");
      LocalId lid(body.locals.size());
      local_names_[name] = lid;
      body.locals.push_back(Local{lid, name, std::move(ty), {}});
    }
    locals_ = &body.locals;

    std::map<std::uint32_t, ullbc::BasicBlock> blocks;
    block_refs_.clear();
    while (!at("}")) {
      const Token& label = peek();
      auto index = parse_block_label();
      if (blocks.count(index)) fail_at("duplicate-name", "block `" + label.text + "` defined twice", label.span);
      expect(":");
      blocks.emplace(index, parse_basic_block());
    }
    expect("}");
    body.span = span_from(begin);

    for (std::uint32_t k = 0; k < blocks.size(); ++k) {
      auto it = blocks.find(k);
      if (it == blocks.end()) fail_at("unknown-block", "block labels must be bb0..bbN without gaps", body.span);
      body.blocks.push_back(std::move(it->second));
    }
    for (const auto& ref : block_refs_)
      if (ref.index >= body.blocks.size())
        fail_at("unknown-block", "jump to undefined block bb" + std::to_string(ref.index), ref.span);
    if (body.blocks.empty()) fail_at("unknown-block", "function body has no blocks", body.span);
    locals_ = nullptr;
    decl.body = std::move(body);
  }

  std::uint32_t parse_block_label() {
    const Token& t = peek();
    if (t.kind != TokKind::Ident || t.text.size() < 3 || t.text.compare(0, 2, "bb") != 0 ||
        !std::all_of(t.text.begin() + 2, t.text.end(), [](char c) { return c >= '0' && c <= '9'; }))
      fail({"block label"});
    next();
    return static_cast<std::uint32_t>(std::stoul(t.text.substr(2)));
  }

  BlockId parse_block_ref() {
    Span s = peek().span;
    auto index = parse_block_label();
    block_refs_.push_back(BlockRef{index, s});
    return BlockId(index);
  }

  ullbc::BasicBlock parse_basic_block() {
    ullbc::BasicBlock bb;
    expect("{");
    while (true) {
      const Token& first = peek();
      Span begin = first.span;
      std::vector<std::string> comments = first.comments;
      auto attrs = parse_attributes();
      if (auto term = try_parse_terminator()) {
        term->span = span_from(begin);
        term->comments = std::move(comments);
        bb.terminator = std::move(*term);
        accept(";");
        expect("}");
        return bb;
      }
      ullbc::Statement st;
      st.attributes = std::move(attrs);
      if (accept("nop")) {
        st.kind = Nop{};
      } else if (accept("drop")) {
        st.kind = Drop{parse_place()};
      } else {
        Place dest = parse_place();
        expect("=");
        if (accept("call")) {
          ullbc::Terminator term;
          term.kind = parse_call_rest(std::move(dest));
          term.span = span_from(begin);
          term.comments = std::move(comments);
          bb.terminator = std::move(term);
          accept(";");
          expect("}");
          return bb;
        }
        st.kind = Assign{std::move(dest), parse_rvalue()};
      }
      st.span = span_from(begin);
      st.comments = std::move(comments);
      bb.statements.push_back(std::move(st));
      if (!accept(";")) fail({";"});
    }
  }

  std::optional<ullbc::Terminator> try_parse_terminator() {
    ullbc::Terminator term;
    if (accept("goto")) {
      term.kind = ullbc::Goto{parse_block_ref()};
    } else if (accept("switch")) {
      ullbc::SwitchInt sw;
      sw.discr = parse_operand();
      expect("->");
      expect("[");
      while (!at("otherwise")) {
        Int128 v = parse_int_literal(ScalarKind::I64).first;
        expect(":");
        sw.cases.emplace_back(v, parse_block_ref());
        expect(",");
      }
      expect("otherwise");
      expect(":");
      sw.otherwise = parse_block_ref();
      expect("]");
      term.kind = std::move(sw);
    } else if (accept("match")) {
      ullbc::Match m;
      m.scrutinee = parse_place();
      const EnumKind* en = enum_kind(crate_, place_type(crate_, *locals_, m.scrutinee));
      if (en == nullptr) fail_at("type-mismatch", "match on a non-enum place", last_end_);
      expect("->");
      expect("[");
      while (!at("]")) {
        if (accept("otherwise")) {
          expect(":");
          m.otherwise = parse_block_ref();
        } else {
          m.cases.emplace_back(parse_variant_name(*en), BlockId());
          expect(":");
          m.cases.back().second = parse_block_ref();
        }
        if (!accept(",")) break;
      }
      expect("]");
      term.kind = std::move(m);
    } else if (accept("assert")) {
      ullbc::Assert a;
      a.cond = parse_operand();
      expect("==");
      if (accept("true")) {
        a.expected = true;
      } else if (accept("false")) {
        a.expected = false;
      } else {
        fail({"true", "false"});
      }
      expect("->");
      a.target = parse_block_ref();
      term.kind = std::move(a);
    } else if (accept("return")) {
      term.kind = ullbc::Return{};
    } else if (accept("abort")) {
      if (accept("panic")) {
        term.kind = ullbc::Abort{AbortKind::Panic};
      } else if (accept("ub")) {
        term.kind = ullbc::Abort{AbortKind::UndefinedBehavior};
      } else {
        fail({"panic", "ub"});
      }
    } else if (accept("unreachable")) {
      term.kind = ullbc::Unreachable{};
    } else {
      return std::nullopt;
    }
    return term;
  }

  ullbc::CallTerm parse_call_rest(Place dest) {
    Call call;
    call.dest = std::move(dest);
    call.func = parse_fn_ref();
    expect("(");
    while (!at(")")) {
      call.args.push_back(parse_operand());
      if (!accept(",")) break;
    }
    expect(")");
    expect("->");
    BlockId target = parse_block_ref();
    return ullbc::CallTerm{std::move(call), target};
  }

  GenericArgs parse_turbofish() {
    if (at("::") && peek(1).is("<")) {
      next();
      next();
      return parse_generic_args_after_open();
    }
    GenericArgs args;
    parse_trait_ref_list(args);
    return args;
  }

  FnPtr parse_fn_ref() {
    FnPtr fp;
    if (accept("<")) {
      TraitRefKind ref = parse_trait_ref();
      expect(">");
      expect("::");
      std::string method = expect_ident("method name");
      fp.func = TraitMethodRef{std::move(ref), method};
      fp.generics = parse_turbofish();
      return fp;
    }
    Span s = peek().span;
    std::vector<std::string> segs{expect_ident("function name")};
    while (at("::") && peek(1).kind == TokKind::Ident) {
      next();
      segs.push_back(next().text);
    }
    std::string full;
    for (const auto& seg : segs) full += (full.empty() ? "" : "::") + seg;
    if (auto it = fun_names_.find(full); it != fun_names_.end()) {
      fp.func = FunRef{it->second};
    } else if (segs.size() >= 2) {
      std::string trait_name = full.substr(0, full.size() - segs.back().size() - 2);
      auto tit = trait_names_.find(trait_name);
      if (tit == trait_names_.end()) fail_at("unknown-name", "unknown function `" + full + "`", s);
      const auto& sk = crate_.trait_decls[tit->second.index];
      bool has = std::any_of(sk.methods.begin(), sk.methods.end(),
                             [&](const TraitMethodDecl& m) { return m.name == segs.back(); });
      if (!has) fail_at("unknown-name", "trait `" + trait_name + "` has no method `" + segs.back() + "`", s);
      fp.func = UnresolvedMethodRef{tit->second, segs.back()};
    } else {
      fail_at("unknown-name", "unknown function `" + full + "`", s);
    }
    fp.generics = parse_turbofish();
    return fp;
  }

  VariantId parse_variant_name(const EnumKind& en) {
    Span s = peek().span;
    std::string name = expect_ident("variant name");
    for (std::size_t i = 0; i < en.variants.size(); ++i)
      if (en.variants[i].name == name) return VariantId(i);
    fail_at("unknown-name", "unknown variant `" + name + "`", s);
  }

  Place parse_place() {
    if (accept("*")) return parse_place().deref();
    Place place;
    if (accept("(")) {
      place = parse_place();
      expect(")");
    } else {
      Span s = peek().span;
      std::string name = expect_ident("place");
      auto it = local_names_.find(name);
      if (it == local_names_.end()) fail_at("unknown-name", "unknown local `" + name + "`", s);
      place.local = it->second;
    }
    while (true) {
      if (at(".") && peek(1).is("as")) {
        next();
        next();
        const EnumKind* en = enum_kind(crate_, place_type(crate_, *locals_, place));
        if (en == nullptr) fail_at("type-mismatch", "downcast of a non-enum place", last_end_);
        place.projection.emplace_back(DowncastProj{parse_variant_name(*en)});
      } else if (accept(".")) {
        const Token& f = peek();
        if (f.kind != TokKind::Ident || f.text.size() < 2 || f.text[0] != 'f' ||
            !std::all_of(f.text.begin() + 1, f.text.end(), [](char c) { return c >= '0' && c <= '9'; }))
          fail({"field (fN)", "as"});
        next();
        place.projection.emplace_back(FieldProj{static_cast<std::uint32_t>(std::stoul(f.text.substr(1)))});
      } else if (accept("[")) {
        place.projection.emplace_back(IndexProj{Box<Operand>(parse_operand())});
        expect("]");
      } else {
        return place;
      }
    }
  }

  Operand parse_operand() {
    if (accept("copy")) return Operand::copy(parse_place());
    if (accept("move")) return Operand::move(parse_place());
    if (accept("const")) return Operand::constant(parse_constant());
    fail({"copy", "move", "const"});
  }

  // Integer literal with an optional kind suffix (`42u32`, `-1i8`).
  std::pair<Int128, ScalarKind> parse_int_literal(ScalarKind default_kind, bool require_suffix = false) {
    bool neg = accept("-");
    if (peek().kind != TokKind::Word) fail({"integer"});
    const Token& t = next();
    std::size_t split = 0;
    while (split < t.text.size() && (std::isdigit(static_cast<unsigned char>(t.text[split])) || t.text[split] == '_'))
      ++split;
    std::string digits = t.text.substr(0, split);
    std::string suffix = t.text.substr(split);
    ScalarKind kind = default_kind;
    if (!suffix.empty()) {
      auto k = scalar_kind_from_string(suffix);
      if (!k) fail_at("syntax-error", "unknown integer suffix `" + suffix + "`", t.span);
      kind = *k;
    } else if (require_suffix) {
      fail_at("syntax-error", "integer constant `" + t.text + "` needs a type suffix such as u32", t.span);
    }
    Int128 v;
    try {
      v = int128_from_string(digits);
    } catch (const std::invalid_argument&) {
      fail_at("syntax-error", "malformed integer `" + t.text + "`", t.span);
    }
    return {neg ? -v : v, kind};
  }

  ConstantValue parse_constant() {
    if (peek().kind == TokKind::Word || (at("-") && peek(1).kind == TokKind::Word)) {
      auto [v, k] = parse_int_literal(ScalarKind::U32, true);
      return ConstantValue::scalar(k, v);
    }
    if (accept("true")) return ConstantValue::boolean(true);
    if (accept("false")) return ConstantValue::boolean(false);
    if (accept("(")) {
      ConstantValue c;
      AdtConst fields;
      std::vector<Ty> tys;
      while (!at(")")) {
        fields.fields.push_back(parse_constant());
        tys.push_back(fields.fields.back().ty);
        if (!accept(",")) break;
      }
      expect(")");
      return ConstantValue{Ty::tuple(std::move(tys)), std::move(fields)};
    }
    if (at("[")) {
      Ty ty = parse_ty();
      AdtConst fields;
      expect("[");
      while (!at("]")) {
        fields.fields.push_back(parse_constant());
        if (!accept(",")) break;
      }
      expect("]");
      return ConstantValue{std::move(ty), std::move(fields)};
    }
    if (accept("raw")) {
      expect("(");
      std::string hex;
      while (!at(")")) {
        if (peek().kind != TokKind::Word && peek().kind != TokKind::Ident) fail({"hex bytes", ")"});
        hex += next().text;
      }
      Span hs = last_end_;
      expect(")");
      expect(":");
      Ty ty = parse_ty();
      if (hex.size() % 2 != 0) fail_at("syntax-error", "raw constant needs an even number of hex digits", hs);
      RawConst raw;
      for (std::size_t i = 0; i < hex.size(); i += 2) {
        auto nibble = [&](char c) -> int {
          if (c >= '0' && c <= '9') return c - '0';
          if (c >= 'a' && c <= 'f') return c - 'a' + 10;
          if (c >= 'A' && c <= 'F') return c - 'A' + 10;
          fail_at("syntax-error", "invalid hex digit in raw constant", hs);
        };
        raw.bytes.push_back(static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
      }
      return ConstantValue{std::move(ty), std::move(raw)};
    }
    Span s = peek().span;
    Ty ty = parse_ty();
    const auto* adt = ty.as<AdtTy>();
    if (adt == nullptr) fail_at("syntax-error", "expected a constant", s);
    AdtConst value;
    if (accept("::")) {
      const EnumKind* en = enum_kind(crate_, ty);
      if (en == nullptr) fail_at("type-mismatch", "variant constant of a non-enum type", s);
      value.variant = parse_variant_name(*en);
      if (accept("(")) {
        while (!at(")")) {
          value.fields.push_back(parse_constant());
          if (!accept(",")) break;
        }
        expect(")");
      }
    } else {
      expect("{");
      while (!at("}")) {
        value.fields.push_back(parse_constant());
        if (!accept(",")) break;
      }
      expect("}");
    }
    return ConstantValue{std::move(ty), std::move(value)};
  }

  Rvalue parse_rvalue() {
    if (accept("use")) return Rvalue{UseRv{parse_operand()}};
    if (peek().kind == TokKind::Ident) {
      if (auto op = binop_from_string(peek().text)) {
        next();
        Operand lhs = parse_operand();
        expect(",");
        return Rvalue{BinaryRv{*op, std::move(lhs), parse_operand()}};
      }
    }
    if (accept("not")) return Rvalue{UnaryRv{UnOp{UnOpKind::Not}, parse_operand()}};
    if (accept("neg")) return Rvalue{UnaryRv{UnOp{UnOpKind::Neg}, parse_operand()}};
    if (accept("cast")) {
      Operand arg = parse_operand();
      expect("as");
      return Rvalue{UnaryRv{UnOp{UnOpKind::Cast, parse_scalar_kind()}, std::move(arg)}};
    }
    if (accept("discriminant")) return Rvalue{DiscriminantRv{parse_place()}};
    if (accept("&")) {
      Mutability mut = accept("mut") ? Mutability::Mut : Mutability::Shared;
      return Rvalue{RefRv{parse_place(), mut}};
    }
    if (accept("aggregate")) {
      AggregateRv agg;
      if (at("(")) {
        agg.kind = TupleAggregate{};
      } else if (at("[")) {
        Span s = peek().span;
        Ty ty = parse_ty();
        const auto* arr = ty.as<ArrayTy>();
        if (arr == nullptr) fail_at("syntax-error", "expected an array type", s);
        agg.kind = ArrayAggregate{*arr->elem};
      } else {
        Span s = peek().span;
        Ty ty = parse_ty();
        const auto* adt = ty.as<AdtTy>();
        if (adt == nullptr) fail_at("syntax-error", "expected an ADT, tuple or array aggregate", s);
        AdtAggregate a{adt->id, std::nullopt, *adt->args};
        if (accept("::")) {
          const EnumKind* en = enum_kind(crate_, ty);
          if (en == nullptr) fail_at("type-mismatch", "variant aggregate of a non-enum type", s);
          a.variant = parse_variant_name(*en);
        }
        agg.kind = std::move(a);
      }
      expect("(");
      while (!at(")")) {
        agg.ops.push_back(parse_operand());
        if (!accept(",")) break;
      }
      expect(")");
      return Rvalue{std::move(agg)};
    }
    fail({"use", "binary operator", "not", "neg", "cast", "discriminant", "&", "aggregate"});
  }

  std::vector<std::vector<Token>> tokens_;
  std::size_t file_ = 0;
  std::size_t pos_ = 0;
  Span last_end_;

  TranslatedCrate crate_;
  std::map<std::string, TypeDeclId> type_names_;
  std::map<std::string, TraitDeclId> trait_names_;
  std::map<std::string, TraitImplId> impl_names_;
  std::map<std::string, FunDeclId> fun_names_;
  std::vector<TraitSkeleton> skeletons_;
  std::vector<ItemLoc> items_;
  std::vector<PendingBody> pending_;

  std::vector<Binder> binders_;
  std::map<std::string, LocalId> local_names_;
  const std::vector<Local>* locals_ = nullptr;
  std::vector<BlockRef> block_refs_;
};

}  // namespace

TranslatedCrate parse_crate(const std::vector<SourceFile>& files, const std::string& crate_name) {
  return Parser(files, crate_name).run();
}

ConstantValue parse_constant(const TranslatedCrate& crate, const std::string& text) {
  return Parser(crate, text).run_constant();
}

TranslatedCrate parse_crate(const std::string& text, const std::string& crate_name) {
  return parse_crate(std::vector<SourceFile>{{"input.mirl", text}}, crate_name);
}

}  // namespace charon
