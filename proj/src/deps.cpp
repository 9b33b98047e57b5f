#include "charon/deps.hpp"

namespace charon {

namespace {

class DependencyCollector {
 public:
  std::set<AnyDeclId> ids;

  void ty(const Ty& t) {
    std::visit(Overloaded{
                   [&](const AdtTy& a) {
                     ids.insert(a.id);
                     args(*a.args);
                   },
                   [&](const RefTy& r) { ty(*r.pointee); },
                   [&](const TupleTy& tu) {
                     for (const auto& e : tu.elems) ty(e);
                   },
                   [&](const ArrayTy& a) { ty(*a.elem); },
                   [&](const AssocTy& a) { trait_ref(*a.trait_ref); },
                   [&](const auto&) {},
               },
               t.kind);
  }

  void args(const GenericArgs& a) {
    for (const auto& t : a.types) ty(t);
    for (const auto& r : a.trait_refs) trait_ref(r);
  }

  void trait_ref(const TraitRefKind& r) {
    std::visit(Overloaded{
                   [&](const ImplRef& i) {
                     ids.insert(i.id);
                     args(*i.args);
                   },
                   [&](const ParentClauseRef& p) { trait_ref(*p.base); },
                   [&](const ItemClauseRef& i) { trait_ref(*i.base); },
                   [&](const auto&) {},
               },
               r.kind);
  }

  void clause(const TraitClause& c) {
    ids.insert(c.trait);
    args(c.args);
  }

  void params(const GenericParams& p) {
    for (const auto& c : p.trait_clauses) clause(c);
    for (const auto& o : p.types_outlive) ty(o.ty);
    for (const auto& c : p.trait_type_constraints) {
      trait_ref(c.trait_ref);
      ty(c.ty);
    }
  }

  void sig(const FunSig& s) {
    params(s.generics);
    for (const auto& t : s.inputs) ty(t);
    ty(s.output);
  }

  void constant(const ConstantValue& c) {
    ty(c.ty);
    if (const auto* a = std::get_if<AdtConst>(&c.kind))
      for (const auto& f : a->fields) constant(f);
  }

  void place(const Place& p) {
    for (const auto& e : p.projection)
      if (const auto* i = std::get_if<IndexProj>(&e)) operand(*i->index);
  }

  void operand(const Operand& o) {
    if (const auto* c = std::get_if<ConstOp>(&o.kind))
      constant(c->value);
    else
      place(*o.place());
  }

  void rvalue(const Rvalue& rv) {
    std::visit(Overloaded{
                   [&](const UseRv& u) { operand(u.op); },
                   [&](const BinaryRv& b) {
                     operand(b.lhs);
                     operand(b.rhs);
                   },
                   [&](const UnaryRv& u) { operand(u.arg); },
                   [&](const DiscriminantRv& d) { place(d.place); },
                   [&](const AggregateRv& a) {
                     std::visit(Overloaded{
                                    [&](const AdtAggregate& adt) {
                                      ids.insert(adt.id);
                                      args(adt.generics);
                                    },
                                    [&](const ArrayAggregate& arr) { ty(arr.elem); },
                                    [&](const TupleAggregate&) {},
                                },
                                a.kind);
                     for (const auto& o : a.ops) operand(o);
                   },
                   [&](const RefRv& r) { place(r.place); },
               },
               rv.kind);
  }

  void call(const Call& c) {
    if (const auto* fp = std::get_if<FnPtr>(&c.func)) {
      std::visit(Overloaded{
                     [&](const FunRef& f) { ids.insert(f.id); },
                     [&](const TraitMethodRef& t) { trait_ref(t.trait_ref); },
                     [&](const UnresolvedMethodRef& u) { ids.insert(u.trait); },
                 },
                 fp->func);
      args(fp->generics);
    } else {
      place(std::get<MoveFnOperand>(c.func).place);
    }
    for (const auto& a : c.args) operand(a);
    place(c.dest);
  }

  template <class S>
  void simple_statement(const S& kind) {
    std::visit(Overloaded{
                   [&](const Assign& a) {
                     place(a.dest);
                     rvalue(a.value);
                   },
                   [&](const Drop& d) { place(d.place); },
                   [&](const auto&) {},
               },
               kind);
  }

  void block(const llbc::Block& b) {
    for_each_statement(b, [&](const llbc::Statement& st) {
      std::visit(Overloaded{
                     [&](const Assign& a) {
                       place(a.dest);
                       rvalue(a.value);
                     },
                     [&](const Drop& d) { place(d.place); },
                     [&](const llbc::CallStmt& c) { call(c.call); },
                     [&](const llbc::SwitchStmt& s) {
                       std::visit(Overloaded{
                                      [&](const llbc::If& i) { operand(i.cond); },
                                      [&](const llbc::SwitchInt& i) { operand(i.discr); },
                                      [&](const llbc::Match& m) { place(m.scrutinee); },
                                  },
                                  s.sw);
                     },
                     [&](const auto&) {},
                 },
                 st.kind);
    });
  }

  void body(const FunBody& b) {
    std::visit(Overloaded{
                   [&](const OpaqueBody&) {},
                   [&](const ullbc::Body& u) {
                     for (const auto& l : u.locals) ty(l.ty);
                     for (const auto& bb : u.blocks) {
                       for (const auto& st : bb.statements) simple_statement(st.kind);
                       std::visit(Overloaded{
                                      [&](const ullbc::SwitchInt& s) { operand(s.discr); },
                                      [&](const ullbc::Match& m) { place(m.scrutinee); },
                                      [&](const ullbc::Assert& a) { operand(a.cond); },
                                      [&](const ullbc::CallTerm& c) { call(c.call); },
                                      [&](const auto&) {},
                                  },
                                  bb.terminator.kind);
                     }
                   },
                   [&](const llbc::Body& l) {
                     for (const auto& loc : l.locals) ty(loc.ty);
                     block(l.body);
                   },
               },
               b);
  }
};

}  // namespace

std::vector<AnyDeclId> all_decl_ids(const TranslatedCrate& crate) {
  std::vector<AnyDeclId> out;
  for (const auto& d : crate.type_decls) out.emplace_back(d.id);
  for (const auto& d : crate.fun_decls) out.emplace_back(d.id);
  for (const auto& d : crate.trait_decls) out.emplace_back(d.id);
  for (const auto& d : crate.trait_impls) out.emplace_back(d.id);
  return out;
}

std::set<AnyDeclId> decl_dependencies(const TranslatedCrate& crate, const AnyDeclId& id) {
  DependencyCollector c;
  std::visit(Overloaded{
                 [&](TypeDeclId i) {
                   const auto* d = crate.type_decl(i);
                   if (d == nullptr) return;
                   c.params(d->generics);
                   std::visit(Overloaded{
                                  [&](const StructKind& s) {
                                    for (const auto& f : s.fields) c.ty(f.ty);
                                  },
                                  [&](const EnumKind& e) {
                                    for (const auto& v : e.variants)
                                      for (const auto& f : v.fields) c.ty(f.ty);
                                  },
                                  [&](const OpaqueKind&) {},
                              },
                              d->kind);
                 },
                 [&](FunDeclId i) {
                   const auto* d = crate.fun_decl(i);
                   if (d == nullptr) return;
                   c.sig(d->signature);
                   c.body(d->body);
                 },
                 [&](TraitDeclId i) {
                   const auto* d = crate.trait_decl(i);
                   if (d == nullptr) return;
                   c.params(d->generics);
                   for (const auto& p : d->parent_clauses) c.clause(p);
                   for (const auto& a : d->assoc_types)
                     for (const auto& cl : a.clauses) c.clause(cl);
                   for (const auto& m : d->methods) c.sig(m.sig);
                 },
                 [&](TraitImplId i) {
                   const auto* d = crate.trait_impl(i);
                   if (d == nullptr) return;
                   c.params(d->generics);
                   c.ids.insert(d->trait);
                   c.args(d->trait_args);
                   for (const auto& a : d->assoc_types) c.ty(a.ty);
                   for (const auto& m : d->methods) c.ids.insert(m.fun);
                 },
             },
             id);
  return std::move(c.ids);
}

}  // namespace charon
