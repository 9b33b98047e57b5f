#pragma once

// Shared data model for both body views: the CFG form (ullbc) and the
// structured form (llbc). Everything here is plain data with structural
// equality; algorithms live in the other headers.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "charon/support.hpp"

namespace charon {

struct Ty;
struct GenericArgs;
struct TraitRefKind;
struct ConstantValue;
struct Operand;

enum class ScalarKind : std::uint8_t { U8, U16, U32, U64, I8, I16, I32, I64 };
enum class Mutability : std::uint8_t { Shared, Mut };

const char* to_string(ScalarKind kind);
std::optional<ScalarKind> scalar_kind_from_string(const std::string& name);
bool is_signed(ScalarKind kind);
unsigned bit_width(ScalarKind kind);
Int128 scalar_min(ScalarKind kind);
Int128 scalar_max(ScalarKind kind);
inline bool scalar_fits(ScalarKind kind, Int128 v) { return v >= scalar_min(kind) && v <= scalar_max(kind); }

// ---------------------------------------------------------------------------
// Types

/// De Bruijn variable: depth 0 is the innermost binder (a trait method's own
/// parameters), depth 1 the enclosing trait. Ordinary items only use depth 0.
struct TypeVar {
  std::uint32_t depth = 0;
  std::uint32_t index = 0;
  bool operator==(const TypeVar&) const = default;
};

struct ScalarTy {
  ScalarKind kind = ScalarKind::U32;
  bool operator==(const ScalarTy&) const = default;
};

struct BoolTy {
  bool operator==(const BoolTy&) const = default;
};

struct AdtTy {
  TypeDeclId id;
  Box<GenericArgs> args;
  bool operator==(const AdtTy&) const = default;
};

struct RefTy {
  std::string region;
  Box<Ty> pointee;
  Mutability mut = Mutability::Shared;
  bool operator==(const RefTy&) const = default;
};

struct TupleTy {
  std::vector<Ty> elems;
  bool operator==(const TupleTy&) const = default;
};

struct ArrayTy {
  Box<Ty> elem;
  std::uint64_t len = 0;
  bool operator==(const ArrayTy&) const = default;
};

/// `<trait_ref>::item`
struct AssocTy {
  Box<TraitRefKind> trait_ref;
  std::string item;
  bool operator==(const AssocTy&) const = default;
};

struct Ty {
  using Kind = std::variant<ScalarTy, BoolTy, AdtTy, TypeVar, RefTy, TupleTy, ArrayTy, AssocTy>;
  Kind kind;

  bool operator==(const Ty&) const = default;

  static Ty scalar(ScalarKind k) { return Ty{ScalarTy{k}}; }
  static Ty boolean() { return Ty{BoolTy{}}; }
  static Ty unit() { return Ty{TupleTy{}}; }
  static Ty var(std::uint32_t index, std::uint32_t depth = 0) { return Ty{TypeVar{depth, index}}; }
  static Ty tuple(std::vector<Ty> elems) { return Ty{TupleTy{std::move(elems)}}; }
  static Ty adt(TypeDeclId id, GenericArgs args);

  template <class T>
  const T* as() const { return std::get_if<T>(&kind); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(kind); }
};

// ---------------------------------------------------------------------------
// Generics and trait references

struct ConstGenericVarRef {
  std::uint32_t index = 0;
  bool operator==(const ConstGenericVarRef&) const = default;
};

struct ConstGenericValue {
  ScalarKind kind = ScalarKind::U64;
  Int128 value = 0;
  bool operator==(const ConstGenericValue&) const = default;
};

using ConstGeneric = std::variant<ConstGenericVarRef, ConstGenericValue>;

struct GenericArgs {
  std::vector<std::string> regions;
  std::vector<Ty> types;
  std::vector<ConstGeneric> const_generics;
  std::vector<TraitRefKind> trait_refs;

  bool operator==(const GenericArgs&) const = default;
  bool empty() const { return regions.empty() && types.empty() && const_generics.empty() && trait_refs.empty(); }
};

inline Ty Ty::adt(TypeDeclId id, GenericArgs args) { return Ty{AdtTy{id, Box<GenericArgs>(std::move(args))}}; }

/// Instance discharged by a top-level impl applied to arguments.
struct ImplRef {
  TraitImplId id;
  Box<GenericArgs> args;
  bool operator==(const ImplRef&) const = default;
};

/// Local where-clause of the enclosing declaration.
struct ClauseRef {
  ClauseId id;
  bool operator==(const ClauseRef&) const = default;
};

/// `index`-th parent (super-trait) clause of the trait instance `base`.
struct ParentClauseRef {
  Box<TraitRefKind> base;
  std::uint32_t index = 0;
  bool operator==(const ParentClauseRef&) const = default;
};

/// `index`-th bound on associated type `item` of the trait instance `base`.
struct ItemClauseRef {
  Box<TraitRefKind> base;
  std::string item;
  std::uint32_t index = 0;
  bool operator==(const ItemClauseRef&) const = default;
};

/// The `Self: Trait` instance inside a trait declaration.
struct SelfRef {
  bool operator==(const SelfRef&) const = default;
};

struct TraitRefKind {
  using Kind = std::variant<ImplRef, ClauseRef, ParentClauseRef, ItemClauseRef, SelfRef>;
  Kind kind;

  bool operator==(const TraitRefKind&) const = default;

  static TraitRefKind impl(TraitImplId id, GenericArgs args) {
    return TraitRefKind{ImplRef{id, Box<GenericArgs>(std::move(args))}};
  }
  static TraitRefKind clause(ClauseId id) { return TraitRefKind{ClauseRef{id}}; }
  static TraitRefKind parent(TraitRefKind base, std::uint32_t index) {
    return TraitRefKind{ParentClauseRef{Box<TraitRefKind>(std::move(base)), index}};
  }
  static TraitRefKind item_clause(TraitRefKind base, std::string item, std::uint32_t index) {
    return TraitRefKind{ItemClauseRef{Box<TraitRefKind>(std::move(base)), std::move(item), index}};
  }
  static TraitRefKind self() { return TraitRefKind{SelfRef{}}; }

  template <class T>
  const T* as() const { return std::get_if<T>(&kind); }
};

struct RegionVar {
  std::string name;
  bool operator==(const RegionVar&) const = default;
};

struct TypeVarDecl {
  std::string name;
  bool operator==(const TypeVarDecl&) const = default;
};

struct ConstGenericVar {
  std::string name;
  ScalarKind ty = ScalarKind::U64;
  bool operator==(const ConstGenericVar&) const = default;
};

/// `Self: trait<args...>`; `args.types[0]` is the self type.
struct TraitClause {
  ClauseId id;
  TraitDeclId trait;
  GenericArgs args;
  bool operator==(const TraitClause&) const = default;
};

struct RegionOutlives {
  std::string longer;
  std::string shorter;
  bool operator==(const RegionOutlives&) const = default;
};

struct TypeOutlives {
  Ty ty;
  std::string region;
  bool operator==(const TypeOutlives&) const = default;
};

/// `<trait_ref>::item = ty`
struct TraitTypeConstraint {
  TraitRefKind trait_ref;
  std::string item;
  Ty ty;
  bool operator==(const TraitTypeConstraint&) const = default;
};

struct GenericParams {
  std::vector<RegionVar> regions;
  std::vector<TypeVarDecl> types;
  std::vector<ConstGenericVar> const_generics;
  std::vector<TraitClause> trait_clauses;
  std::vector<RegionOutlives> regions_outlive;
  std::vector<TypeOutlives> types_outlive;
  std::vector<TraitTypeConstraint> trait_type_constraints;

  bool operator==(const GenericParams&) const = default;
};

// ---------------------------------------------------------------------------
// Constants

struct ScalarConst {
  Int128 value = 0;
  bool operator==(const ScalarConst&) const = default;
};

struct BoolConst {
  bool value = false;
  bool operator==(const BoolConst&) const = default;
};

/// Structs, tuples and arrays have no variant; enums always have one.
struct AdtConst {
  std::optional<VariantId> variant;
  std::vector<ConstantValue> fields;
  bool operator==(const AdtConst&) const = default;
};

/// Undecoded bytes as produced by the frontend; removed by decode_constants.
struct RawConst {
  std::vector<std::uint8_t> bytes;
  bool operator==(const RawConst&) const = default;
};

struct ConstantValue {
  using Kind = std::variant<ScalarConst, BoolConst, AdtConst, RawConst>;
  Ty ty;
  Kind kind;

  bool operator==(const ConstantValue&) const = default;

  static ConstantValue scalar(ScalarKind k, Int128 v) { return {Ty::scalar(k), ScalarConst{v}}; }
  static ConstantValue boolean(bool b) { return {Ty::boolean(), BoolConst{b}}; }
  static ConstantValue unit() { return {Ty::unit(), AdtConst{}}; }
};

// ---------------------------------------------------------------------------
// Places, operands, rvalues

struct FieldProj {
  std::uint32_t field = 0;
  bool operator==(const FieldProj&) const = default;
};

struct DowncastProj {
  VariantId variant;
  bool operator==(const DowncastProj&) const = default;
};

struct IndexProj {
  Box<Operand> index;
  bool operator==(const IndexProj&) const = default;
};

struct DerefProj {
  bool operator==(const DerefProj&) const = default;
};

using ProjectionElem = std::variant<FieldProj, DowncastProj, IndexProj, DerefProj>;

struct Place {
  LocalId local;
  std::vector<ProjectionElem> projection;

  bool operator==(const Place&) const = default;

  static Place of(LocalId l) { return Place{l, {}}; }
  Place field(std::uint32_t f) const;
  Place downcast(VariantId v) const;
  Place deref() const;
};

struct CopyOp {
  Place place;
  bool operator==(const CopyOp&) const = default;
};

struct MoveOp {
  Place place;
  bool operator==(const MoveOp&) const = default;
};

struct ConstOp {
  ConstantValue value;
  bool operator==(const ConstOp&) const = default;
};

struct Operand {
  using Kind = std::variant<CopyOp, MoveOp, ConstOp>;
  Kind kind;

  bool operator==(const Operand&) const = default;

  static Operand copy(Place p) { return Operand{CopyOp{std::move(p)}}; }
  static Operand move(Place p) { return Operand{MoveOp{std::move(p)}}; }
  static Operand constant(ConstantValue v) { return Operand{ConstOp{std::move(v)}}; }

  /// The place read by a copy or move; nullptr for constants.
  const Place* place() const;
};

/// Add/Sub/Mul (and Div/Rem/Shl/Shr/Neg) trap to a panic on overflow;
/// the Wrapping* forms wrap; Checked* yield a `(result, overflowed)` tuple.
enum class BinOp : std::uint8_t {
  Add, Sub, Mul, Div, Rem,
  WrappingAdd, WrappingSub, WrappingMul,
  BitAnd, BitOr, BitXor, Shl, Shr,
  Eq, Ne, Lt, Le, Gt, Ge,
  CheckedAdd, CheckedSub, CheckedMul,
};

const char* to_string(BinOp op);
std::optional<BinOp> binop_from_string(const std::string& name);
bool is_comparison(BinOp op);
bool is_checked(BinOp op);

enum class UnOpKind : std::uint8_t { Not, Neg, Cast };

struct UnOp {
  UnOpKind kind = UnOpKind::Not;
  ScalarKind target = ScalarKind::U8;  // Cast only
  bool operator==(const UnOp&) const = default;
};

struct AdtAggregate {
  TypeDeclId id;
  std::optional<VariantId> variant;
  GenericArgs generics;
  bool operator==(const AdtAggregate&) const = default;
};

struct TupleAggregate {
  bool operator==(const TupleAggregate&) const = default;
};

struct ArrayAggregate {
  Ty elem;
  bool operator==(const ArrayAggregate&) const = default;
};

using AggregateKind = std::variant<AdtAggregate, TupleAggregate, ArrayAggregate>;

struct UseRv {
  Operand op;
  bool operator==(const UseRv&) const = default;
};

struct BinaryRv {
  BinOp op = BinOp::Add;
  Operand lhs;
  Operand rhs;
  bool operator==(const BinaryRv&) const = default;
};

struct UnaryRv {
  UnOp op;
  Operand arg;
  bool operator==(const UnaryRv&) const = default;
};

struct DiscriminantRv {
  Place place;
  bool operator==(const DiscriminantRv&) const = default;
};

struct AggregateRv {
  AggregateKind kind;
  std::vector<Operand> ops;
  bool operator==(const AggregateRv&) const = default;
};

struct RefRv {
  Place place;
  Mutability mut = Mutability::Shared;
  bool operator==(const RefRv&) const = default;
};

struct Rvalue {
  using Kind = std::variant<UseRv, BinaryRv, UnaryRv, DiscriminantRv, AggregateRv, RefRv>;
  Kind kind;
  bool operator==(const Rvalue&) const = default;
};

// ---------------------------------------------------------------------------
// Calls

struct FunRef {
  FunDeclId id;
  bool operator==(const FunRef&) const = default;
};

struct TraitMethodRef {
  TraitRefKind trait_ref;
  std::string method;
  bool operator==(const TraitMethodRef&) const = default;
};

/// A trait method call whose instance has not been (or could not be)
/// resolved; generics are the full, untruncated list.
struct UnresolvedMethodRef {
  TraitDeclId trait;
  std::string method;
  bool operator==(const UnresolvedMethodRef&) const = default;
};

struct FnPtr {
  using Func = std::variant<FunRef, TraitMethodRef, UnresolvedMethodRef>;
  Func func;
  GenericArgs generics;
  bool operator==(const FnPtr&) const = default;
};

struct MoveFnOperand {
  Place place;
  bool operator==(const MoveFnOperand&) const = default;
};

using FnOperand = std::variant<FnPtr, MoveFnOperand>;

struct Call {
  FnOperand func;
  std::vector<Operand> args;
  Place dest;
  bool operator==(const Call&) const = default;
};

enum class AbortKind : std::uint8_t { Panic, UndefinedBehavior };

// Statement kinds shared by both views.
struct Assign {
  Place dest;
  Rvalue value;
  bool operator==(const Assign&) const = default;
};

struct Drop {
  Place place;
  bool operator==(const Drop&) const = default;
};

struct Nop {
  bool operator==(const Nop&) const = default;
};

struct Local {
  LocalId id;
  std::string name;
  Ty ty;
  std::vector<std::string> attributes;
  bool operator==(const Local&) const = default;
};

// ---------------------------------------------------------------------------
// ULLBC: control-flow graph

namespace ullbc {

struct Statement {
  Span span;
  std::vector<std::string> comments;
  std::vector<std::string> attributes;
  std::variant<Assign, Drop, Nop> kind;
  bool operator==(const Statement&) const = default;
};

struct Goto {
  BlockId target;
  bool operator==(const Goto&) const = default;
};

struct SwitchInt {
  Operand discr;
  std::vector<std::pair<Int128, BlockId>> cases;
  BlockId otherwise;
  bool operator==(const SwitchInt&) const = default;
};

struct Match {
  Place scrutinee;
  std::vector<std::pair<VariantId, BlockId>> cases;
  std::optional<BlockId> otherwise;
  bool operator==(const Match&) const = default;
};

struct Assert {
  Operand cond;
  bool expected = true;
  BlockId target;
  bool operator==(const Assert&) const = default;
};

struct CallTerm {
  Call call;
  BlockId target;
  bool operator==(const CallTerm&) const = default;
};

struct Return {
  bool operator==(const Return&) const = default;
};

struct Abort {
  AbortKind kind = AbortKind::Panic;
  bool operator==(const Abort&) const = default;
};

struct Unreachable {
  bool operator==(const Unreachable&) const = default;
};

struct Terminator {
  using Kind = std::variant<Goto, SwitchInt, Match, Assert, CallTerm, Return, Abort, Unreachable>;
  Span span;
  std::vector<std::string> comments;
  Kind kind;
  bool operator==(const Terminator&) const = default;
};

struct BasicBlock {
  std::vector<Statement> statements;
  Terminator terminator;
  bool operator==(const BasicBlock&) const = default;
};

struct Body {
  Span span;
  std::vector<Local> locals;  // locals[0] is the return slot, then the inputs
  std::size_t arg_count = 0;
  std::vector<BasicBlock> blocks;  // blocks[0] is the entry
  bool operator==(const Body&) const = default;
};

/// Successor block ids of a terminator, in case order.
std::vector<BlockId> successors(const Terminator& term);

}  // namespace ullbc

// ---------------------------------------------------------------------------
// LLBC: structured AST

namespace llbc {

struct Statement;

struct Block {
  Span span;
  std::vector<Statement> statements;
  bool operator==(const Block&) const = default;
};

struct If {
  Operand cond;
  Block then_block;
  Block else_block;
  bool operator==(const If&) const = default;
};

struct SwitchInt {
  Operand discr;
  std::vector<std::pair<Int128, Block>> arms;
  Block otherwise;
  bool operator==(const SwitchInt&) const = default;
};

struct Match {
  Place scrutinee;
  std::vector<std::pair<VariantId, Block>> arms;
  std::optional<Block> otherwise;
  bool operator==(const Match&) const = default;
};

using Switch = std::variant<If, SwitchInt, Match>;

struct CallStmt {
  Call call;
  bool operator==(const CallStmt&) const = default;
};

struct AbortStmt {
  AbortKind kind = AbortKind::Panic;
  bool operator==(const AbortStmt&) const = default;
};

struct SwitchStmt {
  Switch sw;
  bool operator==(const SwitchStmt&) const = default;
};

struct Loop {
  Block body;
  bool operator==(const Loop&) const = default;
};

struct ReturnStmt {
  bool operator==(const ReturnStmt&) const = default;
};

/// Exits `depth + 1` enclosing loops.
struct Break {
  std::uint32_t depth = 0;
  bool operator==(const Break&) const = default;
};

/// Jumps to the header of the loop `depth` levels up.
struct Continue {
  std::uint32_t depth = 0;
  bool operator==(const Continue&) const = default;
};

struct Statement {
  using Kind = std::variant<Assign, CallStmt, AbortStmt, SwitchStmt, Loop, ReturnStmt, Nop, Drop, Break, Continue>;
  Span span;
  std::vector<std::string> comments;
  std::vector<std::string> attributes;
  Kind kind;
  bool operator==(const Statement&) const = default;
};

struct Body {
  Span span;
  std::vector<Local> locals;
  std::size_t arg_count = 0;
  Block body;
  bool operator==(const Body&) const = default;
};

}  // namespace llbc

// ---------------------------------------------------------------------------
// Declarations

struct ItemMeta {
  std::string name;  // `::`-separated path
  Span span;
  std::vector<std::string> attributes;
  bool operator==(const ItemMeta&) const = default;
  bool has_attribute(const std::string& attr) const;
};

struct Field {
  std::string name;
  Ty ty;
  bool operator==(const Field&) const = default;
};

struct Variant {
  std::string name;
  std::vector<Field> fields;
  Int128 discriminant = 0;
  bool operator==(const Variant&) const = default;
};

struct StructKind {
  std::vector<Field> fields;
  bool operator==(const StructKind&) const = default;
};

struct EnumKind {
  std::vector<Variant> variants;
  bool operator==(const EnumKind&) const = default;
};

struct OpaqueKind {
  bool operator==(const OpaqueKind&) const = default;
};

struct TypeDecl {
  TypeDeclId id;
  ItemMeta meta;
  GenericParams generics;
  std::variant<StructKind, EnumKind, OpaqueKind> kind;
  bool operator==(const TypeDecl&) const = default;
};

struct FunSig {
  GenericParams generics;
  std::vector<Ty> inputs;
  Ty output;
  bool operator==(const FunSig&) const = default;
};

struct OpaqueBody {
  bool operator==(const OpaqueBody&) const = default;
};

using FunBody = std::variant<OpaqueBody, ullbc::Body, llbc::Body>;

struct FunDecl {
  FunDeclId id;
  ItemMeta meta;
  FunSig signature;
  FunBody body;
  bool operator==(const FunDecl&) const = default;
};

struct AssocTypeDecl {
  std::string name;
  std::vector<TraitClause> clauses;  // bounds on `Self::name`
  bool operator==(const AssocTypeDecl&) const = default;
};

/// Method signature inside a trait: own parameters at depth 0, the trait's at depth 1.
struct TraitMethodDecl {
  std::string name;
  FunSig sig;
  bool operator==(const TraitMethodDecl&) const = default;
};

struct TraitDecl {
  TraitDeclId id;
  ItemMeta meta;
  GenericParams generics;  // types[0] is the implicit Self
  std::vector<TraitClause> parent_clauses;
  std::vector<AssocTypeDecl> assoc_types;
  std::vector<TraitMethodDecl> methods;
  bool operator==(const TraitDecl&) const = default;
};

struct ImplAssocType {
  std::string name;
  Ty ty;
  bool operator==(const ImplAssocType&) const = default;
};

struct ImplMethod {
  std::string name;
  FunDeclId fun;
  bool operator==(const ImplMethod&) const = default;
};

struct TraitImpl {
  TraitImplId id;
  ItemMeta meta;
  GenericParams generics;
  TraitDeclId trait;
  GenericArgs trait_args;  // types[0] is the implementing type
  std::vector<ImplAssocType> assoc_types;
  std::vector<ImplMethod> methods;
  bool operator==(const TraitImpl&) const = default;
};

struct File {
  std::string name;
  bool operator==(const File&) const = default;
};

using AnyDeclId = std::variant<TypeDeclId, FunDeclId, TraitDeclId, TraitImplId>;

std::string to_string(const AnyDeclId& id);

struct DeclGroup {
  bool recursive = false;
  std::vector<AnyDeclId> members;
  bool operator==(const DeclGroup&) const = default;
};

struct TranslatedCrate {
  std::string crate_name;
  std::vector<File> files;
  std::vector<TypeDecl> type_decls;
  std::vector<FunDecl> fun_decls;
  std::vector<TraitDecl> trait_decls;
  std::vector<TraitImpl> trait_impls;
  std::vector<DeclGroup> decl_groups;  // empty until computed

  bool operator==(const TranslatedCrate&) const = default;

  const TypeDecl* type_decl(TypeDeclId id) const;
  const FunDecl* fun_decl(FunDeclId id) const;
  const TraitDecl* trait_decl(TraitDeclId id) const;
  const TraitImpl* trait_impl(TraitImplId id) const;
  const FunDecl* find_fun(const std::string& name) const;
  std::size_t decl_count() const {
    return type_decls.size() + fun_decls.size() + trait_decls.size() + trait_impls.size();
  }
};

// ---------------------------------------------------------------------------
// Substitution

struct SubstError : Error {
  using Error::Error;
};

/// Instantiates the binder at `depth` with `args`: `TypeVar{depth, i}` becomes
/// `args.types[i]` (shifted under deeper binders), variables bound further
/// out move one level in, `Clause(i)` becomes `args.trait_refs[i]` when those
/// are supplied, and `Self` becomes `self_ref` when given.
struct Substitution {
  const GenericArgs* args = nullptr;
  const TraitRefKind* self_ref = nullptr;
  std::uint32_t depth = 0;
  std::string binder = "generics";  // named in arity errors
};

Ty substitute(const Ty& ty, const Substitution& subst);
Ty substitute(const Ty& ty, const GenericArgs& args);
GenericArgs substitute(const GenericArgs& args, const Substitution& subst);
TraitRefKind substitute(const TraitRefKind& ref, const Substitution& subst);
TraitClause substitute(const TraitClause& clause, const Substitution& subst);

/// Adds `amount` to the depth of every variable bound at or beyond `cutoff`.
Ty shift(const Ty& ty, std::uint32_t amount, std::uint32_t cutoff = 0);

/// Identity arguments for `params` (TypeVar i at depth 0, Clause i, ...).
GenericArgs identity_args(const GenericParams& params);

// ---------------------------------------------------------------------------
// Typing helpers

/// Field types of a struct, tuple, array element or enum variant, instantiated.
std::vector<Ty> field_types(const TranslatedCrate& crate, const Ty& ty, std::optional<VariantId> variant);

/// Type of `place` given the body's locals; throws Error("type-mismatch") on ill-typed projections.
Ty place_type(const TranslatedCrate& crate, const std::vector<Local>& locals, const Place& place);
Ty operand_type(const TranslatedCrate& crate, const std::vector<Local>& locals, const Operand& op);

const EnumKind* enum_kind(const TranslatedCrate& crate, const Ty& ty);

// ---------------------------------------------------------------------------
// Validation

/// Checks the structural invariants of the crate; empty result means well-formed.
/// Declaration groups are only checked once computed (non-empty).
Diagnostics validate_crate(const TranslatedCrate& crate);

/// Resets all spans (and the file table) so crates from different sources can
/// be compared for equality up to locations.
void erase_spans(TranslatedCrate& crate);

/// Calls `f(const llbc::Statement&)` on every statement, pre-order.
template <class F>
void for_each_statement(const llbc::Block& block, F&& f);

template <class F>
void for_each_statement(const llbc::Block& block, F&& f) {
  for (const auto& st : block.statements) {
    f(st);
    if (const auto* loop = std::get_if<llbc::Loop>(&st.kind)) {
      for_each_statement(loop->body, f);
    } else if (const auto* sw = std::get_if<llbc::SwitchStmt>(&st.kind)) {
      std::visit(Overloaded{
                     [&](const llbc::If& s) {
                       for_each_statement(s.then_block, f);
                       for_each_statement(s.else_block, f);
                     },
                     [&](const llbc::SwitchInt& s) {
                       for (const auto& [v, b] : s.arms) for_each_statement(b, f);
                       for_each_statement(s.otherwise, f);
                     },
                     [&](const llbc::Match& s) {
                       for (const auto& [v, b] : s.arms) for_each_statement(b, f);
                       if (s.otherwise) for_each_statement(*s.otherwise, f);
                     },
                 },
                 sw->sw);
    }
  }
}

}  // namespace charon
