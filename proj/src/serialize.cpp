#include "charon/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace charon {

using json = nlohmann::ordered_json;

const char* to_string(BodyForm form) { return form == BodyForm::Llbc ? "llbc" : "ullbc"; }

namespace {

// ===========================================================================
// Encoding

json sum(const char* tag, json payload) {
  json out = json::object();
  out[tag] = std::move(payload);
  return out;
}

template <class T, class F>
json list(const std::vector<T>& items, F f) {
  json out = json::array();
  for (const auto& item : items) out.push_back(f(item));
  return out;
}

json strings(const std::vector<std::string>& items) {
  return list(items, [](const std::string& s) { return json(s); });
}

template <class Tag>
json enc(Id<Tag> id) {
  return id.index;
}

json dec_str(Int128 v) { return int128_to_string(v); }

json enc(const Span& s) {
  return json{{"file", s.file.index},
              {"beg_line", s.beg_line},
              {"beg_col", s.beg_col},
              {"end_line", s.end_line},
              {"end_col", s.end_col}};
}

json enc(const Ty& ty);
json enc(const GenericArgs& args);
json enc(const TraitRefKind& ref);
json enc(const ConstantValue& c);
json enc(const Operand& op);

json enc(const ConstGeneric& c) {
  return std::visit(Overloaded{
                        [](const ConstGenericVarRef& v) { return sum("Var", v.index); },
                        [](const ConstGenericValue& v) {
                          return sum("Value", json{{"kind", to_string(v.kind)}, {"value", dec_str(v.value)}});
                        },
                    },
                    c);
}

json enc(const GenericArgs& args) {
  return json{{"regions", strings(args.regions)},
              {"types", list(args.types, [](const Ty& t) { return enc(t); })},
              {"const_generics", list(args.const_generics, [](const ConstGeneric& c) { return enc(c); })},
              {"trait_refs", list(args.trait_refs, [](const TraitRefKind& r) { return enc(r); })}};
}

const char* enc(Mutability m) { return m == Mutability::Mut ? "Mut" : "Shared"; }
const char* enc(AbortKind k) { return k == AbortKind::Panic ? "Panic" : "UndefinedBehavior"; }

json enc(const Ty& ty) {
  return std::visit(
      Overloaded{
          [](const ScalarTy& s) { return sum("Scalar", to_string(s.kind)); },
          [](const BoolTy&) { return json("Bool"); },
          [](const AdtTy& a) { return sum("Adt", json{{"id", enc(a.id)}, {"args", enc(*a.args)}}); },
          [](const TypeVar& v) { return sum("Var", json{{"depth", v.depth}, {"index", v.index}}); },
          [](const RefTy& r) {
            return sum("Ref", json{{"region", r.region}, {"pointee", enc(*r.pointee)}, {"mut", enc(r.mut)}});
          },
          [](const TupleTy& t) { return sum("Tuple", list(t.elems, [](const Ty& e) { return enc(e); })); },
          [](const ArrayTy& a) {
            return sum("Array", json{{"elem", enc(*a.elem)}, {"len", std::to_string(a.len)}});
          },
          [](const AssocTy& a) { return sum("Assoc", json{{"trait_ref", enc(*a.trait_ref)}, {"item", a.item}}); },
      },
      ty.kind);
}

json enc(const TraitRefKind& ref) {
  return std::visit(Overloaded{
                        [](const ImplRef& i) { return sum("Impl", json{{"id", enc(i.id)}, {"args", enc(*i.args)}}); },
                        [](const ClauseRef& c) { return sum("Clause", enc(c.id)); },
                        [](const ParentClauseRef& p) {
                          return sum("ParentClause", json{{"base", enc(*p.base)}, {"index", p.index}});
                        },
                        [](const ItemClauseRef& p) {
                          return sum("ItemClause", json{{"base", enc(*p.base)}, {"item", p.item}, {"index", p.index}});
                        },
                        [](const SelfRef&) { return json("Self"); },
                    },
                    ref.kind);
}

json enc(const TraitClause& c) { return json{{"id", enc(c.id)}, {"trait", enc(c.trait)}, {"args", enc(c.args)}}; }

json enc(const GenericParams& g) {
  return json{
      {"regions", list(g.regions, [](const RegionVar& r) { return json{{"name", r.name}}; })},
      {"types", list(g.types, [](const TypeVarDecl& t) { return json{{"name", t.name}}; })},
      {"const_generics",
       list(g.const_generics, [](const ConstGenericVar& c) { return json{{"name", c.name}, {"ty", to_string(c.ty)}}; })},
      {"trait_clauses", list(g.trait_clauses, [](const TraitClause& c) { return enc(c); })},
      {"regions_outlive",
       list(g.regions_outlive, [](const RegionOutlives& r) { return json{{"longer", r.longer}, {"shorter", r.shorter}}; })},
      {"types_outlive",
       list(g.types_outlive, [](const TypeOutlives& t) { return json{{"ty", enc(t.ty)}, {"region", t.region}}; })},
      {"trait_type_constraints", list(g.trait_type_constraints, [](const TraitTypeConstraint& c) {
         return json{{"trait_ref", enc(c.trait_ref)}, {"item", c.item}, {"ty", enc(c.ty)}};
       })},
  };
}

std::string hex(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

json enc(const ConstantValue& c) {
  json value = std::visit(Overloaded{
                              [](const ScalarConst& s) { return sum("Scalar", dec_str(s.value)); },
                              [](const BoolConst& b) { return sum("Bool", b.value); },
                              [](const AdtConst& a) {
                                return sum("Adt", json{{"variant", a.variant ? json(a.variant->index) : json(nullptr)},
                                                       {"fields", list(a.fields, [](const ConstantValue& f) {
                                                          return enc(f);
                                                        })}});
                              },
                              [](const RawConst& r) { return sum("Raw", hex(r.bytes)); },
                          },
                          c.kind);
  return json{{"ty", enc(c.ty)}, {"value", std::move(value)}};
}

json enc(const Place& p) {
  return json{{"local", enc(p.local)}, {"projection", list(p.projection, [](const ProjectionElem& e) {
                 return std::visit(Overloaded{
                                       [](const FieldProj& f) { return sum("Field", f.field); },
                                       [](const DowncastProj& d) { return sum("Downcast", enc(d.variant)); },
                                       [](const IndexProj& i) { return sum("Index", enc(*i.index)); },
                                       [](const DerefProj&) { return json("Deref"); },
                                   },
                                   e);
               })}};
}

json enc(const Operand& op) {
  return std::visit(Overloaded{
                        [](const CopyOp& c) { return sum("Copy", enc(c.place)); },
                        [](const MoveOp& m) { return sum("Move", enc(m.place)); },
                        [](const ConstOp& c) { return sum("Const", enc(c.value)); },
                    },
                    op.kind);
}

json enc(const std::vector<Operand>& ops) {
  return list(ops, [](const Operand& o) { return enc(o); });
}

json enc(const UnOp& op) {
  switch (op.kind) {
    case UnOpKind::Not: return "Not";
    case UnOpKind::Neg: return "Neg";
    case UnOpKind::Cast: break;
  }
  return sum("Cast", to_string(op.target));
}

json enc(const Rvalue& rv) {
  return std::visit(
      Overloaded{
          [](const UseRv& u) { return sum("Use", enc(u.op)); },
          [](const BinaryRv& b) {
            return sum("BinaryOp", json{{"op", to_string(b.op)}, {"lhs", enc(b.lhs)}, {"rhs", enc(b.rhs)}});
          },
          [](const UnaryRv& u) { return sum("UnaryOp", json{{"op", enc(u.op)}, {"arg", enc(u.arg)}}); },
          [](const DiscriminantRv& d) { return sum("Discriminant", enc(d.place)); },
          [](const AggregateRv& a) {
            json kind = std::visit(
                Overloaded{
                    [](const AdtAggregate& adt) {
                      return sum("Adt", json{{"id", enc(adt.id)},
                                             {"variant", adt.variant ? json(adt.variant->index) : json(nullptr)},
                                             {"generics", enc(adt.generics)}});
                    },
                    [](const TupleAggregate&) { return json("Tuple"); },
                    [](const ArrayAggregate& arr) { return sum("Array", enc(arr.elem)); },
                },
                a.kind);
            return sum("Aggregate", json{{"kind", std::move(kind)}, {"ops", enc(a.ops)}});
          },
          [](const RefRv& r) { return sum("Ref", json{{"place", enc(r.place)}, {"mut", enc(r.mut)}}); },
      },
      rv.kind);
}

json enc(const Call& c) {
  json func = std::visit(
      Overloaded{
          [](const FnPtr& fp) {
            json f = std::visit(Overloaded{
                                    [](const FunRef& r) { return sum("Fun", enc(r.id)); },
                                    [](const TraitMethodRef& m) {
                                      return sum("TraitMethod", json{{"trait_ref", enc(m.trait_ref)}, {"method", m.method}});
                                    },
                                    [](const UnresolvedMethodRef& m) {
                                      return sum("UnresolvedMethod", json{{"trait", enc(m.trait)}, {"method", m.method}});
                                    },
                                },
                                fp.func);
            return sum("Regular", json{{"func", std::move(f)}, {"generics", enc(fp.generics)}});
          },
          [](const MoveFnOperand& m) { return sum("Move", enc(m.place)); },
      },
      c.func);
  return json{{"func", std::move(func)}, {"args", enc(c.args)}, {"dest", enc(c.dest)}};
}

json enc(const Local& l) {
  return json{{"id", enc(l.id)}, {"name", l.name}, {"ty", enc(l.ty)}, {"attributes", strings(l.attributes)}};
}

json enc_locals(const std::vector<Local>& locals) {
  return list(locals, [](const Local& l) { return enc(l); });
}

json enc(const Assign& a) { return json{{"dest", enc(a.dest)}, {"value", enc(a.value)}}; }

json enc(const ullbc::Statement& st) {
  json kind = std::visit(Overloaded{
                             [](const Assign& a) { return sum("Assign", enc(a)); },
                             [](const Drop& d) { return sum("Drop", enc(d.place)); },
                             [](const Nop&) { return json("Nop"); },
                         },
                         st.kind);
  return json{{"span", enc(st.span)},
              {"comments", strings(st.comments)},
              {"attributes", strings(st.attributes)},
              {"kind", std::move(kind)}};
}

json enc(const ullbc::Terminator& t) {
  json kind = std::visit(
      Overloaded{
          [](const ullbc::Goto& g) { return sum("Goto", enc(g.target)); },
          [](const ullbc::SwitchInt& s) {
            json cases = json::array();
            for (const auto& [v, b] : s.cases) cases.push_back(json{{"value", dec_str(v)}, {"target", enc(b)}});
            return sum("SwitchInt",
                       json{{"discr", enc(s.discr)}, {"cases", std::move(cases)}, {"otherwise", enc(s.otherwise)}});
          },
          [](const ullbc::Match& m) {
            json cases = json::array();
            for (const auto& [v, b] : m.cases) cases.push_back(json{{"variant", enc(v)}, {"target", enc(b)}});
            return sum("Match", json{{"scrutinee", enc(m.scrutinee)},
                                     {"cases", std::move(cases)},
                                     {"otherwise", m.otherwise ? enc(*m.otherwise) : json(nullptr)}});
          },
          [](const ullbc::Assert& a) {
            return sum("Assert", json{{"cond", enc(a.cond)}, {"expected", a.expected}, {"target", enc(a.target)}});
          },
          [](const ullbc::CallTerm& c) { return sum("Call", json{{"call", enc(c.call)}, {"target", enc(c.target)}}); },
          [](const ullbc::Return&) { return json("Return"); },
          [](const ullbc::Abort& a) { return sum("Abort", enc(a.kind)); },
          [](const ullbc::Unreachable&) { return json("Unreachable"); },
      },
      t.kind);
  return json{{"span", enc(t.span)}, {"comments", strings(t.comments)}, {"kind", std::move(kind)}};
}

json enc(const ullbc::Body& b) {
  return json{{"span", enc(b.span)},
              {"locals", enc_locals(b.locals)},
              {"arg_count", b.arg_count},
              {"blocks", list(b.blocks, [](const ullbc::BasicBlock& bb) {
                 return json{{"statements", list(bb.statements, [](const ullbc::Statement& s) { return enc(s); })},
                             {"terminator", enc(bb.terminator)}};
               })}};
}

json enc(const llbc::Block& b);

json enc(const llbc::Switch& sw) {
  return std::visit(
      Overloaded{
          [](const llbc::If& i) {
            return sum("If", json{{"cond", enc(i.cond)}, {"then", enc(i.then_block)}, {"else", enc(i.else_block)}});
          },
          [](const llbc::SwitchInt& s) {
            json arms = json::array();
            for (const auto& [v, b] : s.arms) arms.push_back(json{{"value", dec_str(v)}, {"block", enc(b)}});
            return sum("SwitchInt",
                       json{{"discr", enc(s.discr)}, {"arms", std::move(arms)}, {"otherwise", enc(s.otherwise)}});
          },
          [](const llbc::Match& m) {
            json arms = json::array();
            for (const auto& [v, b] : m.arms) arms.push_back(json{{"variant", enc(v)}, {"block", enc(b)}});
            return sum("Match", json{{"scrutinee", enc(m.scrutinee)},
                                     {"arms", std::move(arms)},
                                     {"otherwise", m.otherwise ? enc(*m.otherwise) : json(nullptr)}});
          },
      },
      sw);
}

json enc(const llbc::Statement& st) {
  json kind = std::visit(Overloaded{
                             [](const Assign& a) { return sum("Assign", enc(a)); },
                             [](const llbc::CallStmt& c) { return sum("Call", enc(c.call)); },
                             [](const llbc::AbortStmt& a) { return sum("Abort", enc(a.kind)); },
                             [](const llbc::SwitchStmt& s) { return sum("Switch", enc(s.sw)); },
                             [](const llbc::Loop& l) { return sum("Loop", enc(l.body)); },
                             [](const llbc::ReturnStmt&) { return json("Return"); },
                             [](const Nop&) { return json("Nop"); },
                             [](const Drop& d) { return sum("Drop", enc(d.place)); },
                             [](const llbc::Break& b) { return sum("Break", b.depth); },
                             [](const llbc::Continue& c) { return sum("Continue", c.depth); },
                         },
                         st.kind);
  return json{{"span", enc(st.span)},
              {"comments", strings(st.comments)},
              {"attributes", strings(st.attributes)},
              {"kind", std::move(kind)}};
}

json enc(const llbc::Block& b) {
  return json{{"span", enc(b.span)},
              {"statements", list(b.statements, [](const llbc::Statement& s) { return enc(s); })}};
}

json enc(const llbc::Body& b) {
  return json{{"span", enc(b.span)}, {"locals", enc_locals(b.locals)}, {"arg_count", b.arg_count}, {"body", enc(b.body)}};
}

json enc(const ItemMeta& m) {
  return json{{"name", m.name}, {"span", enc(m.span)}, {"attributes", strings(m.attributes)}};
}

json enc_fields(const std::vector<Field>& fields) {
  return list(fields, [](const Field& f) { return json{{"name", f.name}, {"ty", enc(f.ty)}}; });
}

json enc(const TypeDecl& d) {
  json kind = std::visit(Overloaded{
                             [](const StructKind& s) { return sum("Struct", enc_fields(s.fields)); },
                             [](const EnumKind& e) {
                               return sum("Enum", list(e.variants, [](const Variant& v) {
                                            return json{{"name", v.name},
                                                        {"fields", enc_fields(v.fields)},
                                                        {"discriminant", dec_str(v.discriminant)}};
                                          }));
                             },
                             [](const OpaqueKind&) { return json("Opaque"); },
                         },
                         d.kind);
  return json{{"id", enc(d.id)}, {"meta", enc(d.meta)}, {"generics", enc(d.generics)}, {"kind", std::move(kind)}};
}

json enc(const FunSig& s) {
  return json{{"generics", enc(s.generics)},
              {"inputs", list(s.inputs, [](const Ty& t) { return enc(t); })},
              {"output", enc(s.output)}};
}

json enc(const FunDecl& f, BodyForm form) {
  json body = std::visit(Overloaded{
                             [](const OpaqueBody&) { return json("Opaque"); },
                             [&](const ullbc::Body& b) {
                               if (form != BodyForm::Ullbc)
                                 throw std::invalid_argument(f.meta.name + " has a CFG body in an llbc document");
                               return sum("Unstructured", enc(b));
                             },
                             [&](const llbc::Body& b) {
                               if (form != BodyForm::Llbc)
                                 throw std::invalid_argument(f.meta.name + " has a structured body in a ullbc document");
                               return sum("Structured", enc(b));
                             },
                         },
                         f.body);
  return json{{"id", enc(f.id)}, {"meta", enc(f.meta)}, {"signature", enc(f.signature)}, {"body", std::move(body)}};
}

json enc_clauses(const std::vector<TraitClause>& clauses) {
  return list(clauses, [](const TraitClause& c) { return enc(c); });
}

json enc(const TraitDecl& t) {
  return json{{"id", enc(t.id)},
              {"meta", enc(t.meta)},
              {"generics", enc(t.generics)},
              {"parent_clauses", enc_clauses(t.parent_clauses)},
              {"assoc_types", list(t.assoc_types, [](const AssocTypeDecl& a) {
                 return json{{"name", a.name}, {"clauses", enc_clauses(a.clauses)}};
               })},
              {"methods", list(t.methods, [](const TraitMethodDecl& m) {
                 return json{{"name", m.name}, {"sig", enc(m.sig)}};
               })}};
}

json enc(const TraitImpl& i) {
  return json{
      {"id", enc(i.id)},
      {"meta", enc(i.meta)},
      {"generics", enc(i.generics)},
      {"trait", enc(i.trait)},
      {"trait_args", enc(i.trait_args)},
      {"assoc_types",
       list(i.assoc_types, [](const ImplAssocType& a) { return json{{"name", a.name}, {"ty", enc(a.ty)}}; })},
      {"methods", list(i.methods, [](const ImplMethod& m) { return json{{"name", m.name}, {"fun", enc(m.fun)}}; })}};
}

json enc(const AnyDeclId& id) {
  return std::visit(Overloaded{
                        [](TypeDeclId i) { return sum("Type", enc(i)); },
                        [](FunDeclId i) { return sum("Fun", enc(i)); },
                        [](TraitDeclId i) { return sum("TraitDecl", enc(i)); },
                        [](TraitImplId i) { return sum("TraitImpl", enc(i)); },
                    },
                    id);
}

json enc(const TranslatedCrate& c, BodyForm form) {
  return json{
      {"name", c.crate_name},
      {"files", list(c.files, [](const File& f) { return json{{"name", f.name}}; })},
      {"type_decls", list(c.type_decls, [](const TypeDecl& d) { return enc(d); })},
      {"fun_decls", list(c.fun_decls, [&](const FunDecl& d) { return enc(d, form); })},
      {"trait_decls", list(c.trait_decls, [](const TraitDecl& d) { return enc(d); })},
      {"trait_impls", list(c.trait_impls, [](const TraitImpl& d) { return enc(d); })},
      {"decl_groups", list(c.decl_groups, [](const DeclGroup& g) {
         return json{{"recursive", g.recursive}, {"members", list(g.members, [](const AnyDeclId& m) { return enc(m); })}};
       })},
  };
}

// ===========================================================================
// Decoding

class Decoder {
 public:
  explicit Decoder(bool lenient) : lenient_(lenient) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw JsonError("schema-violation", what, path);
  }

  // Checks that `j` is an object with exactly the listed fields (extra fields
  // are tolerated in lenient mode).
  void object(const json& j, const std::string& path, std::initializer_list<const char*> fields) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (const char* f : fields)
      if (!j.contains(f)) fail(path, std::string("missing field `") + f + "`");
    if (lenient_) return;
    for (const auto& item : j.items()) {
      bool known = std::any_of(fields.begin(), fields.end(), [&](const char* f) { return item.key() == f; });
      if (!known) fail(path + "." + item.key(), "unknown field `" + item.key() + "`");
    }
  }

  // A sum-type value: a bare string for unit variants, else a one-key object.
  std::pair<std::string, const json*> variant(const json& j, const std::string& path) const {
    if (j.is_string()) return {j.get<std::string>(), nullptr};
    if (!j.is_object() || j.size() != 1) fail(path, "expected a variant (string or single-key object)");
    auto it = j.begin();
    return {it.key(), &it.value()};
  }

  const json& payload(const std::pair<std::string, const json*>& v, const std::string& path) const {
    if (v.second == nullptr) fail(path, "variant `" + v.first + "` needs a payload");
    return *v.second;
  }

  void unit(const std::pair<std::string, const json*>& v, const std::string& path) const {
    if (v.second != nullptr) fail(path, "variant `" + v.first + "` takes no payload");
  }

  [[noreturn]] void bad_variant(const std::string& tag, const std::string& path) const {
    fail(path, "unknown variant `" + tag + "`");
  }

  std::uint32_t u32(const json& j, const std::string& path) const {
    if (!j.is_number_unsigned() || j.get<std::uint64_t>() > 0xffffffffULL) fail(path, "expected a 32-bit unsigned integer");
    return static_cast<std::uint32_t>(j.get<std::uint64_t>());
  }

  std::uint64_t u64(const json& j, const std::string& path) const {
    if (!j.is_number_unsigned()) fail(path, "expected an unsigned integer");
    return j.get<std::uint64_t>();
  }

  bool boolean(const json& j, const std::string& path) const {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
  }

  std::string str(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  Int128 int128(const json& j, const std::string& path) const {
    std::string s = str(j, path);
    bool ok = !s.empty() && s != "-" && (s.size() < 2 || s[0] != '0') && !(s.size() > 2 && s[0] == '-' && s[1] == '0') &&
              std::all_of(s.begin() + (s[0] == '-' ? 1 : 0), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (s == "-0") ok = false;
    if (!ok || s.size() > 40) fail(path, "expected a canonical decimal integer string");
    try {
      return int128_from_string(s);
    } catch (const std::exception&) {
      fail(path, "integer out of range");
    }
  }

  std::uint64_t u64_string(const json& j, const std::string& path) const {
    Int128 v = int128(j, path);
    if (v < 0 || v > static_cast<Int128>(UINT64_MAX)) fail(path, "expected an unsigned 64-bit decimal string");
    return static_cast<std::uint64_t>(v);
  }

  template <class F>
  auto array(const json& j, const std::string& path, F f) const {
    if (!j.is_array()) fail(path, "expected an array");
    std::vector<decltype(f(j, path))> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(f(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<std::string> strings(const json& j, const std::string& path) const {
    return array(j, path, [&](const json& e, const std::string& p) { return str(e, p); });
  }

  template <class IdT>
  IdT id(const json& j, const std::string& path) const {
    return IdT(u32(j, path));
  }

  template <class IdT>
  std::optional<IdT> opt_id(const json& j, const std::string& path) const {
    if (j.is_null()) return std::nullopt;
    return IdT(u32(j, path));
  }

  // ---- leaves

  Span span(const json& j, const std::string& p) const {
    object(j, p, {"file", "beg_line", "beg_col", "end_line", "end_col"});
    return Span{id<FileId>(j["file"], p + ".file"), u32(j["beg_line"], p + ".beg_line"), u32(j["beg_col"], p + ".beg_col"),
                u32(j["end_line"], p + ".end_line"), u32(j["end_col"], p + ".end_col")};
  }

  ScalarKind scalar(const json& j, const std::string& p) const {
    auto k = scalar_kind_from_string(str(j, p));
    if (!k) fail(p, "unknown scalar type");
    return *k;
  }

  Mutability mut(const json& j, const std::string& p) const {
    std::string s = str(j, p);
    if (s == "Mut") return Mutability::Mut;
    if (s == "Shared") return Mutability::Shared;
    fail(p, "expected `Shared` or `Mut`");
  }

  AbortKind abort(const json& j, const std::string& p) const {
    std::string s = str(j, p);
    if (s == "Panic") return AbortKind::Panic;
    if (s == "UndefinedBehavior") return AbortKind::UndefinedBehavior;
    fail(p, "expected `Panic` or `UndefinedBehavior`");
  }

  // ---- types and generics

  Ty ty(const json& j, const std::string& p) const {
    auto v = variant(j, p);
    std::string q = p + "." + v.first;
    if (v.first == "Bool") {
      unit(v, p);
      return Ty::boolean();
    }
    const json& x = payload(v, p);
    if (v.first == "Scalar") return Ty::scalar(scalar(x, q));
    if (v.first == "Adt") {
      object(x, q, {"id", "args"});
      return Ty::adt(id<TypeDeclId>(x["id"], q + ".id"), args(x["args"], q + ".args"));
    }
    if (v.first == "Var") {
      object(x, q, {"depth", "index"});
      return Ty::var(u32(x["index"], q + ".index"), u32(x["depth"], q + ".depth"));
    }
    if (v.first == "Ref") {
      object(x, q, {"region", "pointee", "mut"});
      return Ty{RefTy{str(x["region"], q + ".region"), Box<Ty>(ty(x["pointee"], q + ".pointee")), mut(x["mut"], q + ".mut")}};
    }
    if (v.first == "Tuple") return Ty::tuple(array(x, q, [&](const json& e, const std::string& ep) { return ty(e, ep); }));
    if (v.first == "Array") {
      object(x, q, {"elem", "len"});
      return Ty{ArrayTy{Box<Ty>(ty(x["elem"], q + ".elem")), u64_string(x["len"], q + ".len")}};
    }
    if (v.first == "Assoc") {
      object(x, q, {"trait_ref", "item"});
      return Ty{AssocTy{Box<TraitRefKind>(trait_ref(x["trait_ref"], q + ".trait_ref")), str(x["item"], q + ".item")}};
    }
    bad_variant(v.first, p);
  }

  ConstGeneric const_generic(const json& j, const std::string& p) const {
    auto v = variant(j, p);
    std::string q = p + "." + v.first;
    const json& x = payload(v, p);
    if (v.first == "Var") return ConstGenericVarRef{u32(x, q)};
    if (v.first == "Value") {
      object(x, q, {"kind", "value"});
      return ConstGenericValue{scalar(x["kind"], q + ".kind"), int128(x["value"], q + ".value")};
    }
    bad_variant(v.first, p);
  }

  GenericArgs args(const json& j, const std::string& p) const {
    object(j, p, {"regions", "types", "const_generics", "trait_refs"});
    GenericArgs out;
    out.regions = strings(j["regions"], p + ".regions");
    out.types = array(j["types"], p + ".types", [&](const json& e, const std::string& ep) { return ty(e, ep); });
    out.const_generics = array(j["const_generics"], p + ".const_generics",
                               [&](const json& e, const std::string& ep) { return const_generic(e, ep); });
    out.trait_refs =
        array(j["trait_refs"], p + ".trait_refs", [&](const json& e, const std::string& ep) { return trait_ref(e, ep); });
    return out;
  }

  TraitRefKind trait_ref(const json& j, const std::string& p) const {
    auto v = variant(j, p);
    std::string q = p + "." + v.first;
    if (v.first == "Self") {
      unit(v, p);
      return TraitRefKind::self();
    }
    const json& x = payload(v, p);
    if (v.first == "Impl") {
      object(x, q, {"id", "args"});
      return TraitRefKind::impl(id<TraitImplId>(x["id"], q + ".id"), args(x["args"], q + ".args"));
    }
    if (v.first == "Clause") return TraitRefKind::clause(id<ClauseId>(x, q));
    if (v.first == "ParentClause") {
      object(x, q, {"base", "index"});
      return TraitRefKind::parent(trait_ref(x["base"], q + ".base"), u32(x["index"], q + ".index"));
    }
    if (v.first == "ItemClause") {
      object(x, q, {"base", "item", "index"});
      return TraitRefKind::item_clause(trait_ref(x["base"], q + ".base"), str(x["item"], q + ".item"),
                                       u32(x["index"], q + ".index"));
    }
    bad_variant(v.first, p);
  }

  TraitClause clause(const json& j, const std::string& p) const {
    object(j, p, {"id", "trait", "args"});
    return TraitClause{id<ClauseId>(j["id"], p + ".id"), id<TraitDeclId>(j["trait"], p + ".trait"), args(j["args"], p + ".args")};
  }

  std::vector<TraitClause> clauses(const json& j, const std::string& p) const {
    return array(j, p, [&](const json& e, const std::string& ep) { return clause(e, ep); });
  }

  GenericParams params(const json& j, const std::string& p) const {
    object(j, p,
           {"regions", "types", "const_generics", "trait_clauses", "regions_outlive", "types_outlive",
            "trait_type_constraints"});
    GenericParams g;
    g.regions = array(j["regions"], p + ".regions", [&](const json& e, const std::string& ep) {
      object(e, ep, {"name"});
      return RegionVar{str(e["name"], ep + ".name")};
    });
    g.types = array(j["types"], p + ".types", [&](const json& e, const std::string& ep) {
      object(e, ep, {"name"});
      return TypeVarDecl{str(e["name"], ep + ".name")};
    });
    g.const_generics = array(j["const_generics"], p + ".const_generics", [&](const json& e, const std::string& ep) {
      object(e, ep, {"name", "ty"});
      return ConstGenericVar{str(e["name"], ep + ".name"), scalar(e["ty"], ep + ".ty")};
    });
    g.trait_clauses = clauses(j["trait_clauses"], p + ".trait_clauses");
    g.regions_outlive = array(j["regions_outlive"], p + ".regions_outlive", [&](const json& e, const std::string& ep) {
      object(e, ep, {"longer", "shorter"});
      return RegionOutlives{str(e["longer"], ep + ".longer"), str(e["shorter"], ep + ".shorter")};
    });
    g.types_outlive = array(j["types_outlive"], p + ".types_outlive", [&](const json& e, const std::string& ep) {
      object(e, ep, {"ty", "region"});
      return TypeOutlives{ty(e["ty"], ep + ".ty"), str(e["region"], ep + ".region")};
    });
    g.trait_type_constraints =
        array(j["trait_type_constraints"], p + ".trait_type_constraints", [&](const json& e, const std::string& ep) {
          object(e, ep, {"trait_ref", "item", "ty"});
          return TraitTypeConstraint{trait_ref(e["trait_ref"], ep + ".trait_ref"), str(e["item"], ep + ".item"),
                                     ty(e["ty"], ep + ".ty")};
        });
    return g;
  }

  // ---- constants and places

  std::vector<std::uint8_t> bytes(const json& j, const std::string& p) const {
    std::string s = str(j, p);
    auto digit = [&](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      fail(p, "expected lowercase hexadecimal bytes");
    };
    if (s.size() % 2 != 0) fail(p, "odd number of hex digits");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < s.size(); i += 2) out.push_back(static_cast<std::uint8_t>(digit(s[i]) * 16 + digit(s[i + 1])));
    return out;
  }

  ConstantValue constant(const json& j, const std::string& p) const {
    object(j, p, {"ty", "value"});
    ConstantValue c;
    c.ty = ty(j["ty"], p + ".ty");
    std::string vp = p + ".value";
    auto v = variant(j["value"], vp);
    std::string q = vp + "." + v.first;
    const json& x = payload(v, vp);
    if (v.first == "Scalar") {
      c.kind = ScalarConst{int128(x, q)};
    } else if (v.first == "Bool") {
      c.kind = BoolConst{boolean(x, q)};
    } else if (v.first == "Adt") {
      object(x, q, {"variant", "fields"});
      c.kind = AdtConst{opt_id<VariantId>(x["variant"], q + ".variant"),
                        array(x["fields"], q + ".fields", [&](const json& e, const std::string& ep) { return constant(e, ep); })};
    } else if (v.first == "Raw") {
      c.kind = RawConst{bytes(x, q)};
    } else {
      bad_variant(v.first, vp);
    }
    return c;
  }

  Place place(const json& j, const std::string& p) const {
    object(j, p, {"local", "projection"});
    Place out;
    out.local = id<LocalId>(j["local"], p + ".local");
    out.projection = array(j["projection"], p + ".projection", [&](const json& e, const std::string& ep) -> ProjectionElem {
      auto v = variant(e, ep);
      std::string q = ep + "." + v.first;
      if (v.first == "Deref") {
        unit(v, ep);
        return DerefProj{};
      }
      const json& x = payload(v, ep);
      if (v.first == "Field") return FieldProj{u32(x, q)};
      if (v.first == "Downcast") return DowncastProj{id<VariantId>(x, q)};
      if (v.first == "Index") return IndexProj{Box<Operand>(operand(x, q))};
      bad_variant(v.first, ep);
    });
    return out;
  }

  Operand operand(const json& j, const std::string& p) const {
    auto v = variant(j, p);
    std::string q = p + "." + v.first;
    const json& x = payload(v, p);
    if (v.first == "Copy") return Operand::copy(place(x, q));
    if (v.first == "Move") return Operand::move(place(x, q));
    if (v.first == "Const") return Operand::constant(constant(x, q));
    bad_variant(v.first, p);
  }

  std::vector<Operand> operands(const json& j, const std::string& p) const {
    return array(j, p, [&](const json& e, const std::string& ep) { return operand(e, ep); });
  }

  UnOp unop(const json& j, const std::string& p) const {
    auto v = variant(j, p);
    if (v.first == "Not" || v.first == "Neg") {
      unit(v, p);
      return UnOp{v.first == "Not" ? UnOpKind::Not : UnOpKind::Neg, ScalarKind::U8};
    }
    if (v.first == "Cast") return UnOp{UnOpKind::Cast, scalar(payload(v, p), p + ".Cast")};
    bad_variant(v.first, p);
  }

  Rvalue rvalue(const json& j, const std::string& p) const {
    auto v = variant(j, p);
    std::string q = p + "." + v.first;
    const json& x = payload(v, p);
    if (v.first == "Use") return Rvalue{UseRv{operand(x, q)}};
    if (v.first == "BinaryOp") {
      object(x, q, {"op", "lhs", "rhs"});
      auto op = binop_from_string(str(x["op"], q + ".op"));
      if (!op) fail(q + ".op", "unknown binary operator");
      return Rvalue{BinaryRv{*op, operand(x["lhs"], q + ".lhs"), operand(x["rhs"], q + ".rhs")}};
    }
    if (v.first == "UnaryOp") {
      object(x, q, {"op", "arg"});
      return Rvalue{UnaryRv{unop(x["op"], q + ".op"), operand(x["arg"], q + ".arg")}};
    }
    if (v.first == "Discriminant") return Rvalue{DiscriminantRv{place(x, q)}};
    if (v.first == "Aggregate") {
      object(x, q, {"kind", "ops"});
      std::string kp = q + ".kind";
      auto k = variant(x["kind"], kp);
      AggregateKind kind;
      if (k.first == "Tuple") {
        unit(k, kp);
        kind = TupleAggregate{};
      } else if (k.first == "Array") {
        kind = ArrayAggregate{ty(payload(k, kp), kp + ".Array")};
      } else if (k.first == "Adt") {
        const json& a = payload(k, kp);
        std::string ap = kp + ".Adt";
        object(a, ap, {"id", "variant", "generics"});
        kind = AdtAggregate{id<TypeDeclId>(a["id"], ap + ".id"), opt_id<VariantId>(a["variant"], ap + ".variant"),
                            args(a["generics"], ap + ".generics")};
      } else {
        bad_variant(k.first, kp);
      }
      return Rvalue{AggregateRv{std::move(kind), operands(x["ops"], q + ".ops")}};
    }
    if (v.first == "Ref") {
      object(x, q, {"place", "mut"});
      return Rvalue{RefRv{place(x["place"], q + ".place"), mut(x["mut"], q + ".mut")}};
    }
    bad_variant(v.first, p);
  }

  Call call(const json& j, const std::string& p) const {
    object(j, p, {"func", "args", "dest"});
    Call c;
    std::string fp = p + ".func";
    auto v = variant(j["func"], fp);
    std::string q = fp + "." + v.first;
    const json& x = payload(v, fp);
    if (v.first == "Move") {
      c.func = MoveFnOperand{place(x, q)};
    } else if (v.first == "Regular") {
      object(x, q, {"func", "generics"});
      FnPtr ptr;
      std::string gp = q + ".func";
      auto f = variant(x["func"], gp);
      std::string fq = gp + "." + f.first;
      const json& fx = payload(f, gp);
      if (f.first == "Fun") {
        ptr.func = FunRef{id<FunDeclId>(fx, fq)};
      } else if (f.first == "TraitMethod") {
        object(fx, fq, {"trait_ref", "method"});
        ptr.func = TraitMethodRef{trait_ref(fx["trait_ref"], fq + ".trait_ref"), str(fx["method"], fq + ".method")};
      } else if (f.first == "UnresolvedMethod") {
        object(fx, fq, {"trait", "method"});
        ptr.func = UnresolvedMethodRef{id<TraitDeclId>(fx["trait"], fq + ".trait"), str(fx["method"], fq + ".method")};
      } else {
        bad_variant(f.first, gp);
      }
      ptr.generics = args(x["generics"], q + ".generics");
      c.func = std::move(ptr);
    } else {
      bad_variant(v.first, fp);
    }
    c.args = operands(j["args"], p + ".args");
    c.dest = place(j["dest"], p + ".dest");
    return c;
  }

  std::vector<Local> locals(const json& j, const std::string& p) const {
    return array(j, p, [&](const json& e, const std::string& ep) {
      object(e, ep, {"id", "name", "ty", "attributes"});
      return Local{id<LocalId>(e["id"], ep + ".id"), str(e["name"], ep + ".name"), ty(e["ty"], ep + ".ty"),
                   strings(e["attributes"], ep + ".attributes")};
    });
  }

  Assign assign(const json& j, const std::string& p) const {
    object(j, p, {"dest", "value"});
    return Assign{place(j["dest"], p + ".dest"), rvalue(j["value"], p + ".value")};
  }

  // ---- CFG bodies

  ullbc::Statement ustatement(const json& j, const std::string& p) const {
    object(j, p, {"span", "comments", "attributes", "kind"});
    ullbc::Statement st;
    st.span = span(j["span"], p + ".span");
    st.comments = strings(j["comments"], p + ".comments");
    st.attributes = strings(j["attributes"], p + ".attributes");
    std::string kp = p + ".kind";
    auto v = variant(j["kind"], kp);
    if (v.first == "Nop") {
      unit(v, kp);
      st.kind = Nop{};
    } else if (v.first == "Assign") {
      st.kind = assign(payload(v, kp), kp + ".Assign");
    } else if (v.first == "Drop") {
      st.kind = Drop{place(payload(v, kp), kp + ".Drop")};
    } else {
      bad_variant(v.first, kp);
    }
    return st;
  }

  ullbc::Terminator terminator(const json& j, const std::string& p) const {
    object(j, p, {"span", "comments", "kind"});
    ullbc::Terminator t;
    t.span = span(j["span"], p + ".span");
    t.comments = strings(j["comments"], p + ".comments");
    std::string kp = p + ".kind";
    auto v = variant(j["kind"], kp);
    std::string q = kp + "." + v.first;
    if (v.first == "Return" || v.first == "Unreachable") {
      unit(v, kp);
      if (v.first == "Return") t.kind = ullbc::Return{};
      else t.kind = ullbc::Unreachable{};
      return t;
    }
    const json& x = payload(v, kp);
    if (v.first == "Goto") {
      t.kind = ullbc::Goto{id<BlockId>(x, q)};
    } else if (v.first == "SwitchInt") {
      object(x, q, {"discr", "cases", "otherwise"});
      ullbc::SwitchInt s;
      s.discr = operand(x["discr"], q + ".discr");
      s.cases = array(x["cases"], q + ".cases", [&](const json& e, const std::string& ep) {
        object(e, ep, {"value", "target"});
        return std::pair<Int128, BlockId>{int128(e["value"], ep + ".value"), id<BlockId>(e["target"], ep + ".target")};
      });
      s.otherwise = id<BlockId>(x["otherwise"], q + ".otherwise");
      t.kind = std::move(s);
    } else if (v.first == "Match") {
      object(x, q, {"scrutinee", "cases", "otherwise"});
      ullbc::Match m;
      m.scrutinee = place(x["scrutinee"], q + ".scrutinee");
      m.cases = array(x["cases"], q + ".cases", [&](const json& e, const std::string& ep) {
        object(e, ep, {"variant", "target"});
        return std::pair<VariantId, BlockId>{id<VariantId>(e["variant"], ep + ".variant"),
                                             id<BlockId>(e["target"], ep + ".target")};
      });
      m.otherwise = opt_id<BlockId>(x["otherwise"], q + ".otherwise");
      t.kind = std::move(m);
    } else if (v.first == "Assert") {
      object(x, q, {"cond", "expected", "target"});
      t.kind = ullbc::Assert{operand(x["cond"], q + ".cond"), boolean(x["expected"], q + ".expected"),
                             id<BlockId>(x["target"], q + ".target")};
    } else if (v.first == "Call") {
      object(x, q, {"call", "target"});
      t.kind = ullbc::CallTerm{call(x["call"], q + ".call"), id<BlockId>(x["target"], q + ".target")};
    } else if (v.first == "Abort") {
      t.kind = ullbc::Abort{abort(x, q)};
    } else {
      bad_variant(v.first, kp);
    }
    return t;
  }

  ullbc::Body ubody(const json& j, const std::string& p) const {
    object(j, p, {"span", "locals", "arg_count", "blocks"});
    ullbc::Body b;
    b.span = span(j["span"], p + ".span");
    b.locals = locals(j["locals"], p + ".locals");
    b.arg_count = u64(j["arg_count"], p + ".arg_count");
    b.blocks = array(j["blocks"], p + ".blocks", [&](const json& e, const std::string& ep) {
      object(e, ep, {"statements", "terminator"});
      ullbc::BasicBlock bb;
      bb.statements = array(e["statements"], ep + ".statements",
                            [&](const json& s, const std::string& sp) { return ustatement(s, sp); });
      bb.terminator = terminator(e["terminator"], ep + ".terminator");
      return bb;
    });
    return b;
  }

  // ---- structured bodies

  llbc::Block block(const json& j, const std::string& p) const {
    object(j, p, {"span", "statements"});
    llbc::Block b;
    b.span = span(j["span"], p + ".span");
    b.statements = array(j["statements"], p + ".statements",
                         [&](const json& s, const std::string& sp) { return lstatement(s, sp); });
    return b;
  }

  llbc::Switch switch_(const json& j, const std::string& p) const {
    auto v = variant(j, p);
    std::string q = p + "." + v.first;
    const json& x = payload(v, p);
    if (v.first == "If") {
      object(x, q, {"cond", "then", "else"});
      return llbc::If{operand(x["cond"], q + ".cond"), block(x["then"], q + ".then"), block(x["else"], q + ".else")};
    }
    if (v.first == "SwitchInt") {
      object(x, q, {"discr", "arms", "otherwise"});
      llbc::SwitchInt s;
      s.discr = operand(x["discr"], q + ".discr");
      s.arms = array(x["arms"], q + ".arms", [&](const json& e, const std::string& ep) {
        object(e, ep, {"value", "block"});
        return std::pair<Int128, llbc::Block>{int128(e["value"], ep + ".value"), block(e["block"], ep + ".block")};
      });
      s.otherwise = block(x["otherwise"], q + ".otherwise");
      return s;
    }
    if (v.first == "Match") {
      object(x, q, {"scrutinee", "arms", "otherwise"});
      llbc::Match m;
      m.scrutinee = place(x["scrutinee"], q + ".scrutinee");
      m.arms = array(x["arms"], q + ".arms", [&](const json& e, const std::string& ep) {
        object(e, ep, {"variant", "block"});
        return std::pair<VariantId, llbc::Block>{id<VariantId>(e["variant"], ep + ".variant"), block(e["block"], ep + ".block")};
      });
      if (!x["otherwise"].is_null()) m.otherwise = block(x["otherwise"], q + ".otherwise");
      return m;
    }
    bad_variant(v.first, p);
  }

  llbc::Statement lstatement(const json& j, const std::string& p) const {
    object(j, p, {"span", "comments", "attributes", "kind"});
    llbc::Statement st;
    st.span = span(j["span"], p + ".span");
    st.comments = strings(j["comments"], p + ".comments");
    st.attributes = strings(j["attributes"], p + ".attributes");
    std::string kp = p + ".kind";
    auto v = variant(j["kind"], kp);
    std::string q = kp + "." + v.first;
    if (v.first == "Return" || v.first == "Nop") {
      unit(v, kp);
      if (v.first == "Return") st.kind = llbc::ReturnStmt{};
      else st.kind = Nop{};
      return st;
    }
    const json& x = payload(v, kp);
    if (v.first == "Assign") st.kind = assign(x, q);
    else if (v.first == "Call") st.kind = llbc::CallStmt{call(x, q)};
    else if (v.first == "Abort") st.kind = llbc::AbortStmt{abort(x, q)};
    else if (v.first == "Switch") st.kind = llbc::SwitchStmt{switch_(x, q)};
    else if (v.first == "Loop") st.kind = llbc::Loop{block(x, q)};
    else if (v.first == "Drop") st.kind = Drop{place(x, q)};
    else if (v.first == "Break") st.kind = llbc::Break{u32(x, q)};
    else if (v.first == "Continue") st.kind = llbc::Continue{u32(x, q)};
    else bad_variant(v.first, kp);
    return st;
  }

  llbc::Body lbody(const json& j, const std::string& p) const {
    object(j, p, {"span", "locals", "arg_count", "body"});
    llbc::Body b;
    b.span = span(j["span"], p + ".span");
    b.locals = locals(j["locals"], p + ".locals");
    b.arg_count = u64(j["arg_count"], p + ".arg_count");
    b.body = block(j["body"], p + ".body");
    return b;
  }

  // ---- declarations

  ItemMeta meta(const json& j, const std::string& p) const {
    object(j, p, {"name", "span", "attributes"});
    return ItemMeta{str(j["name"], p + ".name"), span(j["span"], p + ".span"), strings(j["attributes"], p + ".attributes")};
  }

  std::vector<Field> fields(const json& j, const std::string& p) const {
    return array(j, p, [&](const json& e, const std::string& ep) {
      object(e, ep, {"name", "ty"});
      return Field{str(e["name"], ep + ".name"), ty(e["ty"], ep + ".ty")};
    });
  }

  TypeDecl type_decl(const json& j, const std::string& p) const {
    object(j, p, {"id", "meta", "generics", "kind"});
    TypeDecl d;
    d.id = id<TypeDeclId>(j["id"], p + ".id");
    d.meta = meta(j["meta"], p + ".meta");
    d.generics = params(j["generics"], p + ".generics");
    std::string kp = p + ".kind";
    auto v = variant(j["kind"], kp);
    if (v.first == "Opaque") {
      unit(v, kp);
      d.kind = OpaqueKind{};
    } else if (v.first == "Struct") {
      d.kind = StructKind{fields(payload(v, kp), kp + ".Struct")};
    } else if (v.first == "Enum") {
      d.kind = EnumKind{array(payload(v, kp), kp + ".Enum", [&](const json& e, const std::string& ep) {
        object(e, ep, {"name", "fields", "discriminant"});
        return Variant{str(e["name"], ep + ".name"), fields(e["fields"], ep + ".fields"),
                       int128(e["discriminant"], ep + ".discriminant")};
      })};
    } else {
      bad_variant(v.first, kp);
    }
    return d;
  }

  FunSig sig(const json& j, const std::string& p) const {
    object(j, p, {"generics", "inputs", "output"});
    return FunSig{params(j["generics"], p + ".generics"),
                  array(j["inputs"], p + ".inputs", [&](const json& e, const std::string& ep) { return ty(e, ep); }),
                  ty(j["output"], p + ".output")};
  }

  FunDecl fun_decl(const json& j, const std::string& p, BodyForm form) const {
    object(j, p, {"id", "meta", "signature", "body"});
    FunDecl f;
    f.id = id<FunDeclId>(j["id"], p + ".id");
    f.meta = meta(j["meta"], p + ".meta");
    f.signature = sig(j["signature"], p + ".signature");
    std::string bp = p + ".body";
    auto v = variant(j["body"], bp);
    if (v.first == "Opaque") {
      unit(v, bp);
      f.body = OpaqueBody{};
    } else if (v.first == "Unstructured") {
      if (form != BodyForm::Ullbc) fail(bp, "CFG body in an llbc document");
      f.body = ubody(payload(v, bp), bp + ".Unstructured");
    } else if (v.first == "Structured") {
      if (form != BodyForm::Llbc) fail(bp, "structured body in a ullbc document");
      f.body = lbody(payload(v, bp), bp + ".Structured");
    } else {
      bad_variant(v.first, bp);
    }
    return f;
  }

  TraitDecl trait_decl(const json& j, const std::string& p) const {
    object(j, p, {"id", "meta", "generics", "parent_clauses", "assoc_types", "methods"});
    TraitDecl t;
    t.id = id<TraitDeclId>(j["id"], p + ".id");
    t.meta = meta(j["meta"], p + ".meta");
    t.generics = params(j["generics"], p + ".generics");
    t.parent_clauses = clauses(j["parent_clauses"], p + ".parent_clauses");
    t.assoc_types = array(j["assoc_types"], p + ".assoc_types", [&](const json& e, const std::string& ep) {
      object(e, ep, {"name", "clauses"});
      return AssocTypeDecl{str(e["name"], ep + ".name"), clauses(e["clauses"], ep + ".clauses")};
    });
    t.methods = array(j["methods"], p + ".methods", [&](const json& e, const std::string& ep) {
      object(e, ep, {"name", "sig"});
      return TraitMethodDecl{str(e["name"], ep + ".name"), sig(e["sig"], ep + ".sig")};
    });
    return t;
  }

  TraitImpl trait_impl(const json& j, const std::string& p) const {
    object(j, p, {"id", "meta", "generics", "trait", "trait_args", "assoc_types", "methods"});
    TraitImpl i;
    i.id = id<TraitImplId>(j["id"], p + ".id");
    i.meta = meta(j["meta"], p + ".meta");
    i.generics = params(j["generics"], p + ".generics");
    i.trait = id<TraitDeclId>(j["trait"], p + ".trait");
    i.trait_args = args(j["trait_args"], p + ".trait_args");
    i.assoc_types = array(j["assoc_types"], p + ".assoc_types", [&](const json& e, const std::string& ep) {
      object(e, ep, {"name", "ty"});
      return ImplAssocType{str(e["name"], ep + ".name"), ty(e["ty"], ep + ".ty")};
    });
    i.methods = array(j["methods"], p + ".methods", [&](const json& e, const std::string& ep) {
      object(e, ep, {"name", "fun"});
      return ImplMethod{str(e["name"], ep + ".name"), id<FunDeclId>(e["fun"], ep + ".fun")};
    });
    return i;
  }

  AnyDeclId any_id(const json& j, const std::string& p) const {
    auto v = variant(j, p);
    std::string q = p + "." + v.first;
    const json& x = payload(v, p);
    if (v.first == "Type") return id<TypeDeclId>(x, q);
    if (v.first == "Fun") return id<FunDeclId>(x, q);
    if (v.first == "TraitDecl") return id<TraitDeclId>(x, q);
    if (v.first == "TraitImpl") return id<TraitImplId>(x, q);
    bad_variant(v.first, p);
  }

  TranslatedCrate crate(const json& j, const std::string& p, BodyForm form) const {
    object(j, p, {"name", "files", "type_decls", "fun_decls", "trait_decls", "trait_impls", "decl_groups"});
    TranslatedCrate c;
    c.crate_name = str(j["name"], p + ".name");
    c.files = array(j["files"], p + ".files", [&](const json& e, const std::string& ep) {
      object(e, ep, {"name"});
      return File{str(e["name"], ep + ".name")};
    });
    c.type_decls = array(j["type_decls"], p + ".type_decls", [&](const json& e, const std::string& ep) { return type_decl(e, ep); });
    c.fun_decls =
        array(j["fun_decls"], p + ".fun_decls", [&](const json& e, const std::string& ep) { return fun_decl(e, ep, form); });
    c.trait_decls =
        array(j["trait_decls"], p + ".trait_decls", [&](const json& e, const std::string& ep) { return trait_decl(e, ep); });
    c.trait_impls =
        array(j["trait_impls"], p + ".trait_impls", [&](const json& e, const std::string& ep) { return trait_impl(e, ep); });
    c.decl_groups = array(j["decl_groups"], p + ".decl_groups", [&](const json& e, const std::string& ep) {
      object(e, ep, {"recursive", "members"});
      return DeclGroup{boolean(e["recursive"], ep + ".recursive"),
                       array(e["members"], ep + ".members", [&](const json& m, const std::string& mp) { return any_id(m, mp); })};
    });
    return c;
  }

 private:
  bool lenient_;
};

}  // namespace

std::string to_json(const TranslatedCrate& crate, BodyForm form) {
  json doc{{"format_version", kFormatVersion}, {"kind", to_string(form)}, {"crate", enc(crate, form)}};
  return doc.dump(2) + "\n";
}

LoadedCrate from_json(std::string_view text, const JsonOptions& options) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw JsonError("malformed-json", e.what(), "");
  }
  Decoder d(options.lenient);
  if (!doc.is_object()) d.fail("$", "expected an object");
  if (!doc.contains("format_version")) d.fail("$", "missing field `format_version`");
  const json& version = doc["format_version"];
  if (!version.is_string()) d.fail("$.format_version", "expected a string");
  if (version.get<std::string>() != kFormatVersion)
    throw JsonError("version-mismatch",
                    "format version " + version.get<std::string>() + " is not supported (expected " + kFormatVersion + ")",
                    "$.format_version");
  d.object(doc, "$", {"format_version", "kind", "crate"});
  LoadedCrate out;
  std::string kind = d.str(doc["kind"], "$.kind");
  if (kind == "llbc") out.form = BodyForm::Llbc;
  else if (kind != "ullbc") d.fail("$.kind", "expected `ullbc` or `llbc`");
  out.crate = d.crate(doc["crate"], "$.crate", out.form);
  Diagnostics problems = validate_crate(out.crate);
  if (!problems.empty()) d.fail("$.crate", problems.front().code + ": " + problems.front().message);
  return out;
}

}  // namespace charon
