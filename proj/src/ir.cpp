#include "charon/ir.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "charon/deps.hpp"

namespace charon {

std::string int128_to_string(Int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // Work on the negative range so that the minimum value is representable.
  std::string digits;
  Int128 n = neg ? v : -v;
  while (n != 0) {
    int d = static_cast<int>(-(n % 10));
    digits.push_back(static_cast<char>('0' + d));
    n /= 10;
  }
  if (neg) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Int128 int128_from_string(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty integer literal");
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) throw std::invalid_argument("bad integer literal: " + text);
  Int128 acc = 0;
  constexpr Int128 kMin = static_cast<Int128>(static_cast<unsigned __int128>(1) << 127);
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '_') continue;
    if (c < '0' || c > '9') throw std::invalid_argument("bad integer literal: " + text);
    // Accumulate negatively to reach the minimum value.
    if (acc < (kMin + (c - '0')) / 10) throw std::invalid_argument("integer literal out of range: " + text);
    acc = acc * 10 - (c - '0');
  }
  if (!neg) {
    if (acc == kMin) throw std::invalid_argument("integer literal out of range: " + text);
    return -acc;
  }
  return acc;
}

std::string to_string(const Span& span) {
  std::ostringstream os;
  os << "file" << span.file.index << ":" << span.beg_line << ":" << span.beg_col << "-" << span.end_line << ":"
     << span.end_col;
  return os.str();
}

std::string to_string(const Diagnostic& diag) {
  std::string out = to_string(diag.span) + ": " + diag.code + ": " + diag.message;
  if (!diag.item.empty()) out += " [in " + diag.item + "]";
  return out;
}

const char* to_string(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::U8: return "u8";
    case ScalarKind::U16: return "u16";
    case ScalarKind::U32: return "u32";
    case ScalarKind::U64: return "u64";
    case ScalarKind::I8: return "i8";
    case ScalarKind::I16: return "i16";
    case ScalarKind::I32: return "i32";
    case ScalarKind::I64: return "i64";
  }
  return "?";
}

std::optional<ScalarKind> scalar_kind_from_string(const std::string& name) {
  static const std::map<std::string, ScalarKind> kinds = {
      {"u8", ScalarKind::U8},   {"u16", ScalarKind::U16}, {"u32", ScalarKind::U32}, {"u64", ScalarKind::U64},
      {"i8", ScalarKind::I8},   {"i16", ScalarKind::I16}, {"i32", ScalarKind::I32}, {"i64", ScalarKind::I64},
  };
  auto it = kinds.find(name);
  if (it == kinds.end()) return std::nullopt;
  return it->second;
}

bool is_signed(ScalarKind kind) { return kind >= ScalarKind::I8; }

unsigned bit_width(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::U8:
    case ScalarKind::I8: return 8;
    case ScalarKind::U16:
    case ScalarKind::I16: return 16;
    case ScalarKind::U32:
    case ScalarKind::I32: return 32;
    case ScalarKind::U64:
    case ScalarKind::I64: return 64;
  }
  return 0;
}

Int128 scalar_min(ScalarKind kind) {
  if (!is_signed(kind)) return 0;
  return -(static_cast<Int128>(1) << (bit_width(kind) - 1));
}

Int128 scalar_max(ScalarKind kind) {
  if (!is_signed(kind)) return (static_cast<Int128>(1) << bit_width(kind)) - 1;
  return (static_cast<Int128>(1) << (bit_width(kind) - 1)) - 1;
}

namespace {

constexpr std::pair<BinOp, const char*> kBinOpNames[] = {
    {BinOp::Add, "add"},
    {BinOp::Sub, "sub"},
    {BinOp::Mul, "mul"},
    {BinOp::Div, "div"},
    {BinOp::Rem, "rem"},
    {BinOp::WrappingAdd, "wrapping_add"},
    {BinOp::WrappingSub, "wrapping_sub"},
    {BinOp::WrappingMul, "wrapping_mul"},
    {BinOp::BitAnd, "bitand"},
    {BinOp::BitOr, "bitor"},
    {BinOp::BitXor, "bitxor"},
    {BinOp::Shl, "shl"},
    {BinOp::Shr, "shr"},
    {BinOp::Eq, "eq"},
    {BinOp::Ne, "ne"},
    {BinOp::Lt, "lt"},
    {BinOp::Le, "le"},
    {BinOp::Gt, "gt"},
    {BinOp::Ge, "ge"},
    {BinOp::CheckedAdd, "checked_add"},
    {BinOp::CheckedSub, "checked_sub"},
    {BinOp::CheckedMul, "checked_mul"},
};

}  // namespace

const char* to_string(BinOp op) {
  for (const auto& [o, name] : kBinOpNames)
    if (o == op) return name;
  return "?";
}

std::optional<BinOp> binop_from_string(const std::string& name) {
  for (const auto& [o, n] : kBinOpNames)
    if (name == n) return o;
  return std::nullopt;
}

bool is_comparison(BinOp op) { return op >= BinOp::Eq && op <= BinOp::Ge; }
bool is_checked(BinOp op) { return op >= BinOp::CheckedAdd; }

Place Place::field(std::uint32_t f) const {
  Place p = *this;
  p.projection.emplace_back(FieldProj{f});
  return p;
}

Place Place::downcast(VariantId v) const {
  Place p = *this;
  p.projection.emplace_back(DowncastProj{v});
  return p;
}

Place Place::deref() const {
  Place p = *this;
  p.projection.emplace_back(DerefProj{});
  return p;
}

const Place* Operand::place() const {
  if (const auto* c = std::get_if<CopyOp>(&kind)) return &c->place;
  if (const auto* m = std::get_if<MoveOp>(&kind)) return &m->place;
  return nullptr;
}

namespace ullbc {

std::vector<BlockId> successors(const Terminator& term) {
  return std::visit(Overloaded{
                        [](const Goto& g) { return std::vector<BlockId>{g.target}; },
                        [](const SwitchInt& s) {
                          std::vector<BlockId> out;
                          for (const auto& [v, b] : s.cases) out.push_back(b);
                          out.push_back(s.otherwise);
                          return out;
                        },
                        [](const Match& m) {
                          std::vector<BlockId> out;
                          for (const auto& [v, b] : m.cases) out.push_back(b);
                          if (m.otherwise) out.push_back(*m.otherwise);
                          return out;
                        },
                        [](const Assert& a) { return std::vector<BlockId>{a.target}; },
                        [](const CallTerm& c) { return std::vector<BlockId>{c.target}; },
                        [](const auto&) { return std::vector<BlockId>{}; },
                    },
                    term.kind);
}

}  // namespace ullbc

bool ItemMeta::has_attribute(const std::string& attr) const {
  return std::find(attributes.begin(), attributes.end(), attr) != attributes.end();
}

std::string to_string(const AnyDeclId& id) {
  return std::visit(Overloaded{
                        [](TypeDeclId i) { return "type#" + std::to_string(i.index); },
                        [](FunDeclId i) { return "fun#" + std::to_string(i.index); },
                        [](TraitDeclId i) { return "trait#" + std::to_string(i.index); },
                        [](TraitImplId i) { return "impl#" + std::to_string(i.index); },
                    },
                    id);
}

const TypeDecl* TranslatedCrate::type_decl(TypeDeclId id) const {
  return id.index < type_decls.size() ? &type_decls[id.index] : nullptr;
}
const FunDecl* TranslatedCrate::fun_decl(FunDeclId id) const {
  return id.index < fun_decls.size() ? &fun_decls[id.index] : nullptr;
}
const TraitDecl* TranslatedCrate::trait_decl(TraitDeclId id) const {
  return id.index < trait_decls.size() ? &trait_decls[id.index] : nullptr;
}
const TraitImpl* TranslatedCrate::trait_impl(TraitImplId id) const {
  return id.index < trait_impls.size() ? &trait_impls[id.index] : nullptr;
}
const FunDecl* TranslatedCrate::find_fun(const std::string& name) const {
  for (const auto& f : fun_decls)
    if (f.meta.name == name) return &f;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Substitution

Ty shift(const Ty& ty, std::uint32_t amount, std::uint32_t cutoff) {
  if (amount == 0) return ty;
  return std::visit(Overloaded{
                        [&](const TypeVar& v) {
                          return v.depth >= cutoff ? Ty::var(v.index, v.depth + amount) : ty;
                        },
                        [&](const AdtTy& a) {
                          GenericArgs args = *a.args;
                          for (auto& t : args.types) t = shift(t, amount, cutoff);
                          return Ty::adt(a.id, std::move(args));
                        },
                        [&](const RefTy& r) {
                          return Ty{RefTy{r.region, Box<Ty>(shift(*r.pointee, amount, cutoff)), r.mut}};
                        },
                        [&](const TupleTy& t) {
                          std::vector<Ty> elems;
                          for (const auto& e : t.elems) elems.push_back(shift(e, amount, cutoff));
                          return Ty::tuple(std::move(elems));
                        },
                        [&](const ArrayTy& a) { return Ty{ArrayTy{Box<Ty>(shift(*a.elem, amount, cutoff)), a.len}}; },
                        [&](const auto&) { return ty; },
                    },
                    ty.kind);
}

Ty substitute(const Ty& ty, const Substitution& s) {
  return std::visit(Overloaded{
                        [&](const TypeVar& v) -> Ty {
                          if (v.depth > s.depth) return Ty::var(v.index, v.depth - 1);
                          if (v.depth < s.depth || s.args == nullptr) return ty;
                          if (v.index >= s.args->types.size()) {
                            throw SubstError("arity-mismatch", "type variable " + std::to_string(v.index) +
                                                                   " out of range for " + s.binder + ": expected at least " +
                                                                   std::to_string(v.index + 1) + " type arguments, got " +
                                                                   std::to_string(s.args->types.size()));
                          }
                          return shift(s.args->types[v.index], s.depth);
                        },
                        [&](const AdtTy& a) { return Ty::adt(a.id, substitute(*a.args, s)); },
                        [&](const RefTy& r) { return Ty{RefTy{r.region, Box<Ty>(substitute(*r.pointee, s)), r.mut}}; },
                        [&](const TupleTy& t) {
                          std::vector<Ty> elems;
                          elems.reserve(t.elems.size());
                          for (const auto& e : t.elems) elems.push_back(substitute(e, s));
                          return Ty::tuple(std::move(elems));
                        },
                        [&](const ArrayTy& a) { return Ty{ArrayTy{Box<Ty>(substitute(*a.elem, s)), a.len}}; },
                        [&](const AssocTy& a) {
                          return Ty{AssocTy{Box<TraitRefKind>(substitute(*a.trait_ref, s)), a.item}};
                        },
                        [&](const auto&) { return ty; },
                    },
                    ty.kind);
}

Ty substitute(const Ty& ty, const GenericArgs& args) {
  Substitution s;
  s.args = &args;
  return substitute(ty, s);
}

GenericArgs substitute(const GenericArgs& args, const Substitution& s) {
  GenericArgs out;
  out.regions = args.regions;
  out.types.reserve(args.types.size());
  for (const auto& t : args.types) out.types.push_back(substitute(t, s));
  for (const auto& c : args.const_generics) {
    const auto* var = std::get_if<ConstGenericVarRef>(&c);
    if (var != nullptr && s.depth == 0 && s.args != nullptr && !s.args->const_generics.empty()) {
      if (var->index >= s.args->const_generics.size()) {
        throw SubstError("arity-mismatch", "const generic " + std::to_string(var->index) + " out of range for " +
                                               s.binder + ": got " +
                                               std::to_string(s.args->const_generics.size()) + " const arguments");
      }
      out.const_generics.push_back(s.args->const_generics[var->index]);
    } else {
      out.const_generics.push_back(c);
    }
  }
  out.trait_refs.reserve(args.trait_refs.size());
  for (const auto& r : args.trait_refs) out.trait_refs.push_back(substitute(r, s));
  return out;
}

TraitRefKind substitute(const TraitRefKind& ref, const Substitution& s) {
  return std::visit(Overloaded{
                        [&](const ImplRef& i) { return TraitRefKind::impl(i.id, substitute(*i.args, s)); },
                        [&](const ClauseRef& c) -> TraitRefKind {
                          if (s.depth != 0 || s.args == nullptr || s.args->trait_refs.empty()) return ref;
                          if (c.id.index >= s.args->trait_refs.size()) {
                            throw SubstError("arity-mismatch",
                                             "clause " + std::to_string(c.id.index) + " out of range for " + s.binder +
                                                 ": expected at least " + std::to_string(c.id.index + 1) +
                                                 " trait references, got " + std::to_string(s.args->trait_refs.size()));
                          }
                          return s.args->trait_refs[c.id.index];
                        },
                        [&](const ParentClauseRef& p) { return TraitRefKind::parent(substitute(*p.base, s), p.index); },
                        [&](const ItemClauseRef& i) {
                          return TraitRefKind::item_clause(substitute(*i.base, s), i.item, i.index);
                        },
                        [&](const SelfRef&) { return s.self_ref != nullptr ? *s.self_ref : ref; },
                    },
                    ref.kind);
}

TraitClause substitute(const TraitClause& clause, const Substitution& s) {
  return TraitClause{clause.id, clause.trait, substitute(clause.args, s)};
}

GenericArgs identity_args(const GenericParams& params) {
  GenericArgs args;
  for (const auto& r : params.regions) args.regions.push_back(r.name);
  for (std::size_t i = 0; i < params.types.size(); ++i) args.types.push_back(Ty::var(static_cast<std::uint32_t>(i)));
  for (std::size_t i = 0; i < params.const_generics.size(); ++i)
    args.const_generics.emplace_back(ConstGenericVarRef{static_cast<std::uint32_t>(i)});
  for (std::size_t i = 0; i < params.trait_clauses.size(); ++i)
    args.trait_refs.push_back(TraitRefKind::clause(ClauseId(i)));
  return args;
}

// ---------------------------------------------------------------------------
// Typing helpers

const EnumKind* enum_kind(const TranslatedCrate& crate, const Ty& ty) {
  const auto* adt = ty.as<AdtTy>();
  if (adt == nullptr) return nullptr;
  const auto* decl = crate.type_decl(adt->id);
  if (decl == nullptr) return nullptr;
  return std::get_if<EnumKind>(&decl->kind);
}

std::vector<Ty> field_types(const TranslatedCrate& crate, const Ty& ty, std::optional<VariantId> variant) {
  if (const auto* t = ty.as<TupleTy>()) return t->elems;
  if (const auto* a = ty.as<ArrayTy>()) return std::vector<Ty>(a->len, *a->elem);
  const auto* adt = ty.as<AdtTy>();
  if (adt == nullptr) throw Error("type-mismatch", "type has no fields");
  const auto* decl = crate.type_decl(adt->id);
  if (decl == nullptr) throw Error("unresolved-id", "unknown type declaration " + std::to_string(adt->id.index));
  Substitution s;
  s.args = &*adt->args;
  s.binder = decl->meta.name;
  const std::vector<Field>* fields = nullptr;
  if (const auto* st = std::get_if<StructKind>(&decl->kind)) {
    fields = &st->fields;
  } else if (const auto* en = std::get_if<EnumKind>(&decl->kind)) {
    if (!variant || variant->index >= en->variants.size())
      throw Error("type-mismatch", "enum field access without a valid downcast on " + decl->meta.name);
    fields = &en->variants[variant->index].fields;
  } else {
    throw Error("type-mismatch", "opaque type " + decl->meta.name + " has no fields");
  }
  std::vector<Ty> out;
  for (const auto& f : *fields) out.push_back(substitute(f.ty, s));
  return out;
}

Ty place_type(const TranslatedCrate& crate, const std::vector<Local>& locals, const Place& place) {
  if (place.local.index >= locals.size())
    throw Error("unresolved-id", "unknown local " + std::to_string(place.local.index));
  Ty ty = locals[place.local.index].ty;
  std::optional<VariantId> variant;
  for (const auto& elem : place.projection) {
    std::visit(Overloaded{
                   [&](const FieldProj& f) {
                     auto fields = field_types(crate, ty, variant);
                     if (f.field >= fields.size())
                       throw Error("type-mismatch", "field " + std::to_string(f.field) + " out of range");
                     ty = fields[f.field];
                     variant.reset();
                   },
                   [&](const DowncastProj& d) {
                     const auto* en = enum_kind(crate, ty);
                     if (en == nullptr || d.variant.index >= en->variants.size())
                       throw Error("type-mismatch", "downcast of a non-enum or to an unknown variant");
                     variant = d.variant;
                   },
                   [&](const IndexProj&) {
                     const auto* arr = ty.as<ArrayTy>();
                     if (arr == nullptr) throw Error("type-mismatch", "index projection on a non-array");
                     Ty elem = *arr->elem;
                     ty = std::move(elem);
                     variant.reset();
                   },
                   [&](const DerefProj&) {
                     const auto* r = ty.as<RefTy>();
                     if (r == nullptr) throw Error("type-mismatch", "deref of a non-reference");
                     Ty inner = *r->pointee;
                     ty = std::move(inner);
                     variant.reset();
                   },
               },
               elem);
  }
  return ty;
}

Ty operand_type(const TranslatedCrate& crate, const std::vector<Local>& locals, const Operand& op) {
  if (const auto* c = std::get_if<ConstOp>(&op.kind)) return c->value.ty;
  return place_type(crate, locals, *op.place());
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  explicit Validator(const TranslatedCrate& crate) : crate_(crate) {}

  Diagnostics run() {
    check_dense();
    for (const auto& t : crate_.type_decls) check_type_decl(t);
    for (const auto& t : crate_.trait_decls) check_trait_decl(t);
    for (const auto& i : crate_.trait_impls) check_trait_impl(i);
    for (const auto& f : crate_.fun_decls) check_fun_decl(f);
    if (!crate_.decl_groups.empty()) check_groups();
    return std::move(diags_);
  }

 private:
  void report(std::string code, const Span& span, std::string message) {
    diags_.push_back(Diagnostic{std::move(code), span, std::move(message), item_});
  }

  void check_dense() {
    Span none;
    for (std::size_t k = 0; k < crate_.type_decls.size(); ++k)
      if (crate_.type_decls[k].id.index != k) report("non-dense-id", none, "type declaration out of place");
    for (std::size_t k = 0; k < crate_.fun_decls.size(); ++k)
      if (crate_.fun_decls[k].id.index != k) report("non-dense-id", none, "function declaration out of place");
    for (std::size_t k = 0; k < crate_.trait_decls.size(); ++k)
      if (crate_.trait_decls[k].id.index != k) report("non-dense-id", none, "trait declaration out of place");
    for (std::size_t k = 0; k < crate_.trait_impls.size(); ++k)
      if (crate_.trait_impls[k].id.index != k) report("non-dense-id", none, "trait impl out of place");
  }

  void check_span(const Span& span) {
    if (span.file.index >= crate_.files.size()) {
      report("unresolved-id", span, "span refers to unknown file " + std::to_string(span.file.index));
      return;
    }
    if (std::tie(span.beg_line, span.beg_col) > std::tie(span.end_line, span.end_col))
      report("bad-span", span, "span start lies after its end");
  }

  void check_meta(const ItemMeta& meta) {
    item_ = meta.name;
    span_ = meta.span;
    check_span(meta.span);
  }

  // Binder stack: back() is depth 0.
  void check_ty(const Ty& ty) {
    std::visit(Overloaded{
                   [&](const TypeVar& v) {
                     if (v.depth >= binders_.size()) {
                       report("unbound-var", span_, "type variable at depth " + std::to_string(v.depth) + " has no binder");
                       return;
                     }
                     const auto* params = binders_[binders_.size() - 1 - v.depth];
                     if (v.index >= params->types.size())
                       report("unbound-var", span_, "type variable " + std::to_string(v.index) + " out of range");
                   },
                   [&](const AdtTy& a) {
                     const auto* decl = crate_.type_decl(a.id);
                     if (decl == nullptr) {
                       report("unresolved-id", span_, "unknown type declaration " + std::to_string(a.id.index));
                       return;
                     }
                     if (a.args->types.size() != decl->generics.types.size())
                       report("arity-mismatch", span_,
                              decl->meta.name + ": expected " + std::to_string(decl->generics.types.size()) +
                                  " type arguments, got " + std::to_string(a.args->types.size()));
                     check_args(*a.args);
                   },
                   [&](const RefTy& r) { check_ty(*r.pointee); },
                   [&](const TupleTy& t) {
                     for (const auto& e : t.elems) check_ty(e);
                   },
                   [&](const ArrayTy& a) { check_ty(*a.elem); },
                   [&](const AssocTy& a) { check_trait_ref(*a.trait_ref); },
                   [&](const auto&) {},
               },
               ty.kind);
  }

  void check_args(const GenericArgs& args) {
    for (const auto& t : args.types) check_ty(t);
    for (const auto& r : args.trait_refs) check_trait_ref(r);
  }

  void check_trait_ref(const TraitRefKind& ref) {
    std::visit(Overloaded{
                   [&](const ImplRef& i) {
                     if (crate_.trait_impl(i.id) == nullptr)
                       report("unresolved-id", span_, "unknown trait impl " + std::to_string(i.id.index));
                     check_args(*i.args);
                   },
                   [&](const ClauseRef& c) {
                     if (binders_.empty() || c.id.index >= binders_.back()->trait_clauses.size())
                       report("unresolved-id", span_, "unknown clause " + std::to_string(c.id.index));
                   },
                   [&](const ParentClauseRef& p) { check_trait_ref(*p.base); },
                   [&](const ItemClauseRef& i) { check_trait_ref(*i.base); },
                   [&](const SelfRef&) {
                     if (!in_trait_) report("unresolved-id", span_, "Self instance used outside a trait declaration");
                   },
               },
               ref.kind);
  }

  void check_clause(const TraitClause& clause) {
    const auto* decl = crate_.trait_decl(clause.trait);
    if (decl == nullptr) {
      report("unresolved-id", span_, "unknown trait " + std::to_string(clause.trait.index));
      return;
    }
    if (clause.args.types.size() != decl->generics.types.size())
      report("arity-mismatch", span_,
             decl->meta.name + ": expected " + std::to_string(decl->generics.types.size()) + " type arguments, got " +
                 std::to_string(clause.args.types.size()));
    check_args(clause.args);
  }

  void check_params(const GenericParams& params) {
    for (std::size_t i = 0; i < params.trait_clauses.size(); ++i) {
      if (params.trait_clauses[i].id.index != i) report("non-dense-id", span_, "clause ids must be dense");
      check_clause(params.trait_clauses[i]);
    }
    for (const auto& c : params.trait_type_constraints) {
      check_trait_ref(c.trait_ref);
      check_ty(c.ty);
    }
    for (const auto& o : params.types_outlive) check_ty(o.ty);
  }

  void check_type_decl(const TypeDecl& decl) {
    check_meta(decl.meta);
    binders_ = {&decl.generics};
    check_params(decl.generics);
    std::visit(Overloaded{
                   [&](const StructKind& s) {
                     for (const auto& f : s.fields) check_ty(f.ty);
                   },
                   [&](const EnumKind& e) {
                     std::set<Int128> seen;
                     for (const auto& v : e.variants) {
                       if (!seen.insert(v.discriminant).second)
                         report("duplicate-discriminant", span_, "variant " + v.name + " reuses a discriminant");
                       for (const auto& f : v.fields) check_ty(f.ty);
                     }
                   },
                   [&](const OpaqueKind&) {},
               },
               decl.kind);
  }

  void check_sig(const FunSig& sig) {
    for (const auto& t : sig.inputs) check_ty(t);
    check_ty(sig.output);
  }

  void check_trait_decl(const TraitDecl& decl) {
    check_meta(decl.meta);
    in_trait_ = true;
    binders_ = {&decl.generics};
    if (decl.generics.types.empty()) report("arity-mismatch", span_, "trait declarations need an implicit Self");
    check_params(decl.generics);
    for (const auto& p : decl.parent_clauses) check_clause(p);
    for (const auto& a : decl.assoc_types)
      for (const auto& c : a.clauses) check_clause(c);
    for (const auto& m : decl.methods) {
      binders_ = {&decl.generics, &m.sig.generics};
      check_params(m.sig.generics);
      check_sig(m.sig);
    }
    in_trait_ = false;
  }

  void check_trait_impl(const TraitImpl& impl) {
    check_meta(impl.meta);
    binders_ = {&impl.generics};
    check_params(impl.generics);
    const auto* trait = crate_.trait_decl(impl.trait);
    if (trait == nullptr) {
      report("unresolved-id", span_, "unknown trait " + std::to_string(impl.trait.index));
      return;
    }
    if (impl.trait_args.types.size() != trait->generics.types.size())
      report("arity-mismatch", span_, "impl of " + trait->meta.name + " has the wrong number of trait arguments");
    check_args(impl.trait_args);
    std::set<std::string> declared_types, declared_methods, given_types, given_methods;
    for (const auto& a : trait->assoc_types) declared_types.insert(a.name);
    for (const auto& m : trait->methods) declared_methods.insert(m.name);
    for (const auto& a : impl.assoc_types) {
      given_types.insert(a.name);
      check_ty(a.ty);
    }
    for (const auto& m : impl.methods) {
      given_methods.insert(m.name);
      if (crate_.fun_decl(m.fun) == nullptr)
        report("unresolved-id", span_, "method " + m.name + " refers to unknown function");
    }
    if (declared_types != given_types || declared_methods != given_methods)
      report("impl-items-mismatch", span_, "impl items differ from those declared by " + trait->meta.name);
  }

  void check_fun_decl(const FunDecl& decl) {
    check_meta(decl.meta);
    binders_ = {&decl.signature.generics};
    check_params(decl.signature.generics);
    check_sig(decl.signature);
    std::visit(Overloaded{
                   [&](const OpaqueBody&) {},
                   [&](const ullbc::Body& b) { check_ullbc(decl, b); },
                   [&](const llbc::Body& b) { check_llbc(decl, b); },
               },
               decl.body);
  }

  void check_locals(const FunDecl& decl, const std::vector<Local>& locals, std::size_t arg_count) {
    if (arg_count != decl.signature.inputs.size())
      report("arity-mismatch", span_, "body argument count differs from the signature");
    if (locals.size() < arg_count + 1) {
      report("arity-mismatch", span_, "body lacks the return slot or argument locals");
      return;
    }
    for (std::size_t i = 0; i < locals.size(); ++i) {
      if (locals[i].id.index != i) report("non-dense-id", span_, "local ids must be dense");
      check_ty(locals[i].ty);
    }
    locals_ = &locals;
  }

  void check_place(const Place& p) {
    if (locals_ == nullptr || p.local.index >= locals_->size()) {
      report("unresolved-id", span_, "unknown local " + std::to_string(p.local.index));
      return;
    }
    for (const auto& e : p.projection)
      if (const auto* idx = std::get_if<IndexProj>(&e)) check_operand(*idx->index);
    try {
      (void)place_type(crate_, *locals_, p);
    } catch (const Error& e) {
      report(e.code(), span_, e.what());
    }
  }

  void check_constant(const ConstantValue& c) {
    check_ty(c.ty);
    std::visit(Overloaded{
                   [&](const ScalarConst& s) {
                     const auto* st = c.ty.as<ScalarTy>();
                     if (st == nullptr)
                       report("type-mismatch", span_, "scalar constant with a non-scalar type");
                     else if (!scalar_fits(st->kind, s.value))
                       report("scalar-overflow", span_, int128_to_string(s.value) + " does not fit " + to_string(st->kind));
                   },
                   [&](const AdtConst& a) {
                     for (const auto& f : a.fields) check_constant(f);
                   },
                   [&](const auto&) {},
               },
               c.kind);
  }

  void check_operand(const Operand& op) {
    if (const auto* c = std::get_if<ConstOp>(&op.kind))
      check_constant(c->value);
    else
      check_place(*op.place());
  }

  void check_rvalue(const Rvalue& rv) {
    std::visit(Overloaded{
                   [&](const UseRv& u) { check_operand(u.op); },
                   [&](const BinaryRv& b) {
                     check_operand(b.lhs);
                     check_operand(b.rhs);
                   },
                   [&](const UnaryRv& u) { check_operand(u.arg); },
                   [&](const DiscriminantRv& d) { check_place(d.place); },
                   [&](const AggregateRv& a) {
                     if (const auto* adt = std::get_if<AdtAggregate>(&a.kind)) {
                       if (crate_.type_decl(adt->id) == nullptr)
                         report("unresolved-id", span_, "unknown type declaration in aggregate");
                       check_args(adt->generics);
                     }
                     for (const auto& o : a.ops) check_operand(o);
                   },
                   [&](const RefRv& r) { check_place(r.place); },
               },
               rv.kind);
  }

  void check_call(const Call& call) {
    if (const auto* fp = std::get_if<FnPtr>(&call.func)) {
      std::visit(Overloaded{
                     [&](const FunRef& f) {
                       if (crate_.fun_decl(f.id) == nullptr)
                         report("unresolved-id", span_, "call to unknown function " + std::to_string(f.id.index));
                     },
                     [&](const TraitMethodRef& t) { check_trait_ref(t.trait_ref); },
                     [&](const UnresolvedMethodRef& u) {
                       if (crate_.trait_decl(u.trait) == nullptr)
                         report("unresolved-id", span_, "call to a method of an unknown trait");
                     },
                 },
                 fp->func);
      check_args(fp->generics);
    } else {
      check_place(std::get<MoveFnOperand>(call.func).place);
    }
    for (const auto& a : call.args) check_operand(a);
    check_place(call.dest);
  }

  void check_ullbc(const FunDecl& decl, const ullbc::Body& body) {
    check_locals(decl, body.locals, body.arg_count);
    if (body.blocks.empty()) report("empty-body", span_, "body has no entry block");
    for (const auto& bb : body.blocks) {
      for (const auto& st : bb.statements) {
        span_ = st.span;
        check_span(st.span);
        std::visit(Overloaded{
                       [&](const Assign& a) {
                         check_place(a.dest);
                         check_rvalue(a.value);
                       },
                       [&](const Drop& d) { check_place(d.place); },
                       [&](const Nop&) {},
                   },
                   st.kind);
      }
      span_ = bb.terminator.span;
      check_span(bb.terminator.span);
      for (auto target : ullbc::successors(bb.terminator))
        if (target.index >= body.blocks.size())
          report("unknown-block", span_, "jump to unknown block bb" + std::to_string(target.index));
      std::visit(Overloaded{
                     [&](const ullbc::SwitchInt& s) {
                       check_operand(s.discr);
                       std::set<Int128> seen;
                       for (const auto& [v, b] : s.cases)
                         if (!seen.insert(v).second) report("duplicate-case", span_, "switch case values must be distinct");
                     },
                     [&](const ullbc::Match& m) { check_place(m.scrutinee); },
                     [&](const ullbc::Assert& a) { check_operand(a.cond); },
                     [&](const ullbc::CallTerm& c) { check_call(c.call); },
                     [&](const auto&) {},
                 },
                 bb.terminator.kind);
    }
    locals_ = nullptr;
  }

  void check_block(const llbc::Block& block, std::uint32_t loop_depth) {
    for (const auto& st : block.statements) {
      span_ = st.span;
      check_span(st.span);
      std::visit(Overloaded{
                     [&](const Assign& a) {
                       check_place(a.dest);
                       check_rvalue(a.value);
                     },
                     [&](const llbc::CallStmt& c) { check_call(c.call); },
                     [&](const llbc::SwitchStmt& s) {
                       std::visit(Overloaded{
                                      [&](const llbc::If& i) {
                                        check_operand(i.cond);
                                        check_block(i.then_block, loop_depth);
                                        check_block(i.else_block, loop_depth);
                                      },
                                      [&](const llbc::SwitchInt& i) {
                                        check_operand(i.discr);
                                        for (const auto& [v, b] : i.arms) check_block(b, loop_depth);
                                        check_block(i.otherwise, loop_depth);
                                      },
                                      [&](const llbc::Match& m) {
                                        check_place(m.scrutinee);
                                        for (const auto& [v, b] : m.arms) check_block(b, loop_depth);
                                        if (m.otherwise) check_block(*m.otherwise, loop_depth);
                                      },
                                  },
                                  s.sw);
                     },
                     [&](const llbc::Loop& l) { check_block(l.body, loop_depth + 1); },
                     [&](const Drop& d) { check_place(d.place); },
                     [&](const llbc::Break& b) {
                       if (b.depth >= loop_depth) report("bad-break-depth", span_, "break escapes all enclosing loops");
                     },
                     [&](const llbc::Continue& c) {
                       if (c.depth >= loop_depth) report("bad-break-depth", span_, "continue escapes all enclosing loops");
                     },
                     [&](const auto&) {},
                 },
                 st.kind);
    }
  }

  void check_llbc(const FunDecl& decl, const llbc::Body& body) {
    check_locals(decl, body.locals, body.arg_count);
    check_block(body.body, 0);
    locals_ = nullptr;
  }

  void check_groups() {
    Span none;
    item_.clear();
    std::map<AnyDeclId, std::size_t> group_of;
    for (std::size_t g = 0; g < crate_.decl_groups.size(); ++g) {
      const auto& group = crate_.decl_groups[g];
      if (!group.recursive && group.members.size() != 1)
        report("bad-decl-group", none, "non-recursive group must have exactly one member");
      for (const auto& m : group.members)
        if (!group_of.emplace(m, g).second) report("bad-decl-group", none, to_string(m) + " appears in two groups");
    }
    auto all = all_decl_ids(crate_);
    for (const auto& id : all)
      if (!group_of.count(id)) report("bad-decl-group", none, to_string(id) + " is in no declaration group");
    if (group_of.size() != all.size()) report("bad-decl-group", none, "groups mention unknown declarations");
    for (const auto& id : all) {
      auto from = group_of.find(id);
      if (from == group_of.end()) continue;
      for (const auto& dep : decl_dependencies(crate_, id)) {
        auto to = group_of.find(dep);
        if (to != group_of.end() && to->second > from->second)
          report("bad-decl-group", none, to_string(id) + " depends on the later " + to_string(dep));
      }
    }
  }

  const TranslatedCrate& crate_;
  Diagnostics diags_;
  std::string item_;
  Span span_;
  std::vector<const GenericParams*> binders_;
  const std::vector<Local>* locals_ = nullptr;
  bool in_trait_ = false;
};

}  // namespace

Diagnostics validate_crate(const TranslatedCrate& crate) { return Validator(crate).run(); }

// ---------------------------------------------------------------------------

namespace {

void erase_block(llbc::Block& block) {
  block.span = Span{};
  for (auto& st : block.statements) {
    st.span = Span{};
    if (auto* loop = std::get_if<llbc::Loop>(&st.kind)) {
      erase_block(loop->body);
    } else if (auto* sw = std::get_if<llbc::SwitchStmt>(&st.kind)) {
      std::visit(Overloaded{
                     [](llbc::If& s) {
                       erase_block(s.then_block);
                       erase_block(s.else_block);
                     },
                     [](llbc::SwitchInt& s) {
                       for (auto& [v, b] : s.arms) erase_block(b);
                       erase_block(s.otherwise);
                     },
                     [](llbc::Match& s) {
                       for (auto& [v, b] : s.arms) erase_block(b);
                       if (s.otherwise) erase_block(*s.otherwise);
                     },
                 },
                 sw->sw);
    }
  }
}

}  // namespace

void erase_spans(TranslatedCrate& crate) {
  crate.files = {File{"<erased>"}};
  for (auto& t : crate.type_decls) t.meta.span = Span{};
  for (auto& t : crate.trait_decls) t.meta.span = Span{};
  for (auto& t : crate.trait_impls) t.meta.span = Span{};
  for (auto& f : crate.fun_decls) {
    f.meta.span = Span{};
    if (auto* u = std::get_if<ullbc::Body>(&f.body)) {
      u->span = Span{};
      for (auto& bb : u->blocks) {
        for (auto& st : bb.statements) st.span = Span{};
        bb.terminator.span = Span{};
      }
    } else if (auto* l = std::get_if<llbc::Body>(&f.body)) {
      l->span = Span{};
      erase_block(l->body);
    }
  }
}

}  // namespace charon
