#include <set>
#include <sstream>

#include "charon/frontend.hpp"

namespace charon {

namespace {

bool is_ident(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) != 0) return false;
  for (char c : s)
    if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '_') return false;
  return true;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, const char* sep, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += f(xs[i]);
  }
  return out;
}

class Printer {
 public:
  explicit Printer(const TranslatedCrate& crate) : crate_(crate) {}

  // -------------------------------------------------------------------------
  // Types and generics

  std::string ty(const Ty& t) {
    return std::visit(
        Overloaded{
            [](const ScalarTy& s) -> std::string { return to_string(s.kind); },
            [](const BoolTy&) -> std::string { return "bool"; },
            [&](const AdtTy& a) -> std::string {
              const auto* decl = crate_.type_decl(a.id);
              std::string name = decl ? decl->meta.name : "Type" + std::to_string(a.id.index);
              return name + args(*a.args);
            },
            [&](const TypeVar& v) { return var_name(v); },
            [&](const RefTy& r) {
              std::string out = "&";
              if (r.region != "_") out += "'" + r.region + " ";
              if (r.mut == Mutability::Mut) out += "mut ";
              return out + ty(*r.pointee);
            },
            [&](const TupleTy& tup) {
              if (tup.elems.size() == 1) return "(" + ty(tup.elems[0]) + ",)";
              return "(" + join(tup.elems, ", ", [&](const Ty& e) { return ty(e); }) + ")";
            },
            [&](const ArrayTy& a) { return "[" + ty(*a.elem) + "; " + std::to_string(a.len) + "]"; },
            [&](const AssocTy& a) { return "<" + trait_ref(*a.trait_ref) + ">::" + a.item; },
        },
        t.kind);
  }

  std::string var_name(const TypeVar& v) const {
    if (v.depth < binders_.size()) {
      const auto* params = binders_[binders_.size() - 1 - v.depth];
      if (v.index < params->types.size()) return params->types[v.index].name;
    }
    return v.depth == 0 ? "T" + std::to_string(v.index)
                        : "T" + std::to_string(v.depth) + "_" + std::to_string(v.index);
  }

  std::string const_generic(const ConstGeneric& c) const {
    if (const auto* v = std::get_if<ConstGenericValue>(&c))
      return int128_to_string(v->value) + to_string(v->kind);
    auto index = std::get<ConstGenericVarRef>(c).index;
    if (!binders_.empty() && index < binders_.back()->const_generics.size())
      return binders_.back()->const_generics[index].name;
    return "N" + std::to_string(index);
  }

  // `<regions, types, consts>[trait refs]`, each part omitted when empty.
  std::string args(const GenericArgs& a) {
    std::vector<std::string> parts;
    for (const auto& r : a.regions) parts.push_back("'" + r);
    for (const auto& t : a.types) parts.push_back(ty(t));
    for (const auto& c : a.const_generics) parts.push_back(const_generic(c));
    std::string out;
    if (!parts.empty()) out = "<" + join(parts, ", ", [](const std::string& s) { return s; }) + ">";
    return out + trait_refs(a);
  }

  std::string trait_refs(const GenericArgs& a) {
    if (a.trait_refs.empty()) return "";
    return "[" + join(a.trait_refs, ", ", [&](const TraitRefKind& r) { return trait_ref(r); }) + "]";
  }

  std::string trait_ref(const TraitRefKind& r) {
    return std::visit(
        Overloaded{
            [&](const ImplRef& i) {
              const auto* impl = crate_.trait_impl(i.id);
              return "impl " + (impl ? impl->meta.name : "Impl" + std::to_string(i.id.index)) + args(*i.args);
            },
            [](const ClauseRef& c) { return "@" + std::to_string(c.id.index); },
            [&](const ParentClauseRef& p) {
              return trait_ref(*p.base) + ".parent(" + std::to_string(p.index) + ")";
            },
            [&](const ItemClauseRef& p) {
              return trait_ref(*p.base) + ".item(" + p.item + ", " + std::to_string(p.index) + ")";
            },
            [](const SelfRef&) -> std::string { return "Self"; },
        },
        r.kind);
  }

  std::string trait_name(TraitDeclId id) const {
    const auto* t = crate_.trait_decl(id);
    return t ? t->meta.name : "Trait" + std::to_string(id.index);
  }

  // `Trait<args>` for a clause; the self type is printed by the caller.
  std::string bound(const TraitClause& c) {
    GenericArgs rest = c.args;
    if (!rest.types.empty()) rest.types.erase(rest.types.begin());
    return trait_name(c.trait) + args(rest);
  }

  std::string generic_params(const GenericParams& p, std::size_t skip_types = 0) {
    std::vector<std::string> parts;
    for (const auto& r : p.regions) parts.push_back("'" + r.name);
    for (std::size_t i = skip_types; i < p.types.size(); ++i) parts.push_back(p.types[i].name);
    for (const auto& c : p.const_generics) parts.push_back("const " + c.name + ": " + to_string(c.ty));
    if (parts.empty()) return "";
    return "<" + join(parts, ", ", [](const std::string& s) { return s; }) + ">";
  }

  std::string where_clauses(const GenericParams& p) {
    std::vector<std::string> preds;
    for (const auto& o : p.regions_outlive) preds.push_back("'" + o.longer + ": '" + o.shorter);
    for (const auto& o : p.types_outlive) preds.push_back(ty(o.ty) + ": '" + o.region);
    for (const auto& c : p.trait_clauses)
      preds.push_back((c.args.types.empty() ? std::string("()") : ty(c.args.types[0])) + ": " + bound(c));
    for (const auto& c : p.trait_type_constraints)
      preds.push_back("<" + trait_ref(c.trait_ref) + ">::" + c.item + " = " + ty(c.ty));
    if (preds.empty()) return "";
    return " where " + join(preds, ", ", [](const std::string& s) { return s; });
  }

  // -------------------------------------------------------------------------
  // Constants, places, operands

  std::string constant(const ConstantValue& c) {
    return std::visit(
        Overloaded{
            [&](const ScalarConst& s) {
              const auto* st = c.ty.as<ScalarTy>();
              return int128_to_string(s.value) + (st ? to_string(st->kind) : "");
            },
            [](const BoolConst& b) -> std::string { return b.value ? "true" : "false"; },
            [&](const AdtConst& a) -> std::string {
              auto fields = [&](const char* open, const char* close) {
                return open + join(a.fields, ", ", [&](const ConstantValue& f) { return constant(f); }) + close;
              };
              if (c.ty.is<TupleTy>()) {
                if (a.fields.size() == 1) return "(" + constant(a.fields[0]) + ",)";
                return fields("(", ")");
              }
              if (c.ty.is<ArrayTy>()) return ty(c.ty) + fields("[", "]");
              if (a.variant) {
                std::string out = ty(c.ty) + "::" + variant_name(c.ty, *a.variant);
                return a.fields.empty() ? out : out + fields("(", ")");
              }
              return a.fields.empty() ? ty(c.ty) + " {}" : ty(c.ty) + fields(" { ", " }");
            },
            [&](const RawConst& r) {
              static const char* const kHex = "0123456789abcdef";
              std::string hex;
              for (auto b : r.bytes) {
                hex += kHex[b >> 4];
                hex += kHex[b & 15];
              }
              return "raw(" + hex + "): " + ty(c.ty);
            },
        },
        c.kind);
  }

  std::string variant_name(const Ty& t, VariantId v) const {
    const EnumKind* en = enum_kind(crate_, t);
    if (en != nullptr && v.index < en->variants.size()) return en->variants[v.index].name;
    return "V" + std::to_string(v.index);
  }

  std::string local_name(LocalId id) const {
    if (id.index < local_names_.size()) return local_names_[id.index];
    return "l" + std::to_string(id.index);
  }

  void set_locals(const std::vector<Local>* locals) {
    locals_ = locals;
    local_names_.clear();
    if (locals == nullptr) return;
    std::set<std::string> seen;
    for (const auto& l : *locals) {
      std::string name = l.name;
      bool ok = is_ident(name) && name != "_" && seen.insert(name).second;
      local_names_.push_back(ok ? name : "l" + std::to_string(l.id.index));
    }
  }

  std::string place(const Place& p) {
    std::string out = local_name(p.local);
    Place prefix = Place::of(p.local);
    for (std::size_t i = 0; i < p.projection.size(); ++i) {
      const auto& elem = p.projection[i];
      std::visit(Overloaded{
                     [&](const FieldProj& f) { out += ".f" + std::to_string(f.field); },
                     [&](const DowncastProj& d) {
                       std::string name = "V" + std::to_string(d.variant.index);
                       if (locals_ != nullptr) {
                         try {
                           name = variant_name(place_type(crate_, *locals_, prefix), d.variant);
                         } catch (const Error&) {
                         }
                       }
                       out += ".as " + name;
                     },
                     [&](const IndexProj& ix) { out += "[" + operand(*ix.index) + "]"; },
                     [&](const DerefProj&) {
                       out = i + 1 == p.projection.size() ? "*" + out : "(*" + out + ")";
                     },
                 },
                 elem);
      prefix.projection.push_back(elem);
    }
    return out;
  }

  std::string operand(const Operand& op) {
    return std::visit(Overloaded{
                          [&](const CopyOp& c) { return "copy " + place(c.place); },
                          [&](const MoveOp& m) { return "move " + place(m.place); },
                          [&](const ConstOp& c) { return "const " + constant(c.value); },
                      },
                      op.kind);
  }

  std::string operands(const std::vector<Operand>& ops) {
    return join(ops, ", ", [&](const Operand& o) { return operand(o); });
  }

  std::string rvalue(const Rvalue& rv) {
    return std::visit(
        Overloaded{
            [&](const UseRv& u) { return "use " + operand(u.op); },
            [&](const BinaryRv& b) {
              return std::string(to_string(b.op)) + " " + operand(b.lhs) + ", " + operand(b.rhs);
            },
            [&](const UnaryRv& u) {
              switch (u.op.kind) {
                case UnOpKind::Not: return "not " + operand(u.arg);
                case UnOpKind::Neg: return "neg " + operand(u.arg);
                case UnOpKind::Cast: break;
              }
              return "cast " + operand(u.arg) + " as " + to_string(u.op.target);
            },
            [&](const DiscriminantRv& d) { return "discriminant " + place(d.place); },
            [&](const AggregateRv& a) {
              std::string head = std::visit(
                  Overloaded{
                      [&](const AdtAggregate& adt) {
                        Ty t = Ty::adt(adt.id, adt.generics);
                        std::string out = ty(t);
                        if (adt.variant) out += "::" + variant_name(t, *adt.variant);
                        return out;
                      },
                      [](const TupleAggregate&) { return std::string(); },
                      [&](const ArrayAggregate& arr) {
                        return "[" + ty(arr.elem) + "; " + std::to_string(a.ops.size()) + "]";
                      },
                  },
                  a.kind);
              return "aggregate " + head + "(" + operands(a.ops) + ")";
            },
            [&](const RefRv& r) { return std::string(r.mut == Mutability::Mut ? "&mut " : "&") + place(r.place); },
        },
        rv.kind);
  }

  std::string turbofish(const GenericArgs& a) {
    if (a.regions.empty() && a.types.empty() && a.const_generics.empty()) return trait_refs(a);
    return "::" + args(a);
  }

  std::string call(const Call& c) {
    std::string callee = std::visit(
        Overloaded{
            [&](const FnPtr& fp) {
              std::string head = std::visit(
                  Overloaded{
                      [&](const FunRef& f) {
                        const auto* decl = crate_.fun_decl(f.id);
                        return decl ? decl->meta.name : "fun" + std::to_string(f.id.index);
                      },
                      [&](const TraitMethodRef& m) { return "<" + trait_ref(m.trait_ref) + ">::" + m.method; },
                      [&](const UnresolvedMethodRef& m) { return trait_name(m.trait) + "::" + m.method; },
                  },
                  fp.func);
              return head + turbofish(fp.generics);
            },
            [&](const MoveFnOperand& m) { return "move " + place(m.place); },
        },
        c.func);
    return place(c.dest) + " = call " + callee + "(" + operands(c.args) + ")";
  }

  // -------------------------------------------------------------------------
  // Bodies

  void line(std::ostringstream& os, int indent, const std::string& text) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << text << "\n";
  }

  void comments_and_attrs(std::ostringstream& os, int indent, const std::vector<std::string>& comments,
                          const std::vector<std::string>& attrs, std::string& prefix) {
    for (const auto& c : comments) line(os, indent, c.empty() ? "//" : "// " + c);
    for (const auto& a : attrs) prefix += "#[" + a + "] ";
  }

  std::string shared_stmt(const std::variant<Assign, Drop, Nop>& kind) {
    return std::visit(Overloaded{
                          [&](const Assign& a) { return place(a.dest) + " = " + rvalue(a.value); },
                          [&](const Drop& d) { return "drop " + place(d.place); },
                          [](const Nop&) -> std::string { return "nop"; },
                      },
                      kind);
  }

  static std::string bb(BlockId b) { return "bb" + std::to_string(b.index); }

  std::string terminator(const ullbc::Terminator& t) {
    return std::visit(
        Overloaded{
            [](const ullbc::Goto& g) { return "goto " + bb(g.target); },
            [&](const ullbc::SwitchInt& s) {
              std::string out = "switch " + operand(s.discr) + " -> [";
              for (const auto& [v, target] : s.cases) out += int128_to_string(v) + ": " + bb(target) + ", ";
              return out + "otherwise: " + bb(s.otherwise) + "]";
            },
            [&](const ullbc::Match& m) {
              Ty t = locals_ ? place_type(crate_, *locals_, m.scrutinee) : Ty::unit();
              std::vector<std::string> arms;
              for (const auto& [v, target] : m.cases) arms.push_back(variant_name(t, v) + ": " + bb(target));
              if (m.otherwise) arms.push_back("otherwise: " + bb(*m.otherwise));
              return "match " + place(m.scrutinee) + " -> [" +
                     join(arms, ", ", [](const std::string& s) { return s; }) + "]";
            },
            [&](const ullbc::Assert& a) {
              return "assert " + operand(a.cond) + " == " + (a.expected ? "true" : "false") + " -> " + bb(a.target);
            },
            [&](const ullbc::CallTerm& c) { return call(c.call) + " -> " + bb(c.target); },
            [](const ullbc::Return&) -> std::string { return "return"; },
            [](const ullbc::Abort& a) -> std::string {
              return a.kind == AbortKind::Panic ? "abort panic" : "abort ub";
            },
            [](const ullbc::Unreachable&) -> std::string { return "unreachable"; },
        },
        t.kind);
  }

  void locals_decls(std::ostringstream& os, const std::vector<Local>& locals, std::size_t arg_count) {
    for (std::size_t i = arg_count + 1; i < locals.size(); ++i)
      line(os, 1, "let " + local_name(LocalId(i)) + ": " + ty(locals[i].ty) + ";");
  }

  void ullbc_body(std::ostringstream& os, const ullbc::Body& body) {
    locals_decls(os, body.locals, body.arg_count);
    for (std::size_t b = 0; b < body.blocks.size(); ++b) {
      line(os, 1, bb(BlockId(b)) + ": {");
      const auto& block = body.blocks[b];
      for (const auto& st : block.statements) {
        std::string prefix;
        comments_and_attrs(os, 2, st.comments, st.attributes, prefix);
        line(os, 2, prefix + shared_stmt(st.kind) + ";");
      }
      std::string prefix;
      comments_and_attrs(os, 2, block.terminator.comments, {}, prefix);
      line(os, 2, terminator(block.terminator));
      line(os, 1, "}");
    }
  }

  void llbc_block(std::ostringstream& os, int indent, const llbc::Block& block) {
    for (const auto& st : block.statements) llbc_stmt(os, indent, st);
  }

  void llbc_stmt(std::ostringstream& os, int indent, const llbc::Statement& st) {
    std::string prefix;
    comments_and_attrs(os, indent, st.comments, st.attributes, prefix);
    std::visit(
        Overloaded{
            [&](const Assign& a) { line(os, indent, prefix + shared_stmt(a) + ";"); },
            [&](const Drop& d) { line(os, indent, prefix + shared_stmt(d) + ";"); },
            [&](const Nop& n) { line(os, indent, prefix + shared_stmt(n) + ";"); },
            [&](const llbc::CallStmt& c) { line(os, indent, prefix + call(c.call) + ";"); },
            [&](const llbc::AbortStmt& a) {
              line(os, indent, prefix + (a.kind == AbortKind::Panic ? "abort panic;" : "abort ub;"));
            },
            [&](const llbc::ReturnStmt&) { line(os, indent, prefix + "return;"); },
            [&](const llbc::Break& b) { line(os, indent, prefix + "break " + std::to_string(b.depth) + ";"); },
            [&](const llbc::Continue& c) {
              line(os, indent, prefix + "continue " + std::to_string(c.depth) + ";");
            },
            [&](const llbc::Loop& l) {
              line(os, indent, prefix + "loop {");
              llbc_block(os, indent + 1, l.body);
              line(os, indent, "}");
            },
            [&](const llbc::SwitchStmt& s) {
              std::visit(
                  Overloaded{
                      [&](const llbc::If& i) {
                        line(os, indent, prefix + "if " + operand(i.cond) + " {");
                        llbc_block(os, indent + 1, i.then_block);
                        line(os, indent, "} else {");
                        llbc_block(os, indent + 1, i.else_block);
                        line(os, indent, "}");
                      },
                      [&](const llbc::SwitchInt& sw) {
                        line(os, indent, prefix + "switch " + operand(sw.discr) + " {");
                        for (const auto& [v, arm] : sw.arms) {
                          line(os, indent + 1, int128_to_string(v) + " => {");
                          llbc_block(os, indent + 2, arm);
                          line(os, indent + 1, "}");
                        }
                        line(os, indent + 1, "otherwise => {");
                        llbc_block(os, indent + 2, sw.otherwise);
                        line(os, indent + 1, "}");
                        line(os, indent, "}");
                      },
                      [&](const llbc::Match& m) {
                        Ty t = locals_ ? place_type(crate_, *locals_, m.scrutinee) : Ty::unit();
                        line(os, indent, prefix + "match " + place(m.scrutinee) + " {");
                        for (const auto& [v, arm] : m.arms) {
                          line(os, indent + 1, variant_name(t, v) + " => {");
                          llbc_block(os, indent + 2, arm);
                          line(os, indent + 1, "}");
                        }
                        if (m.otherwise) {
                          line(os, indent + 1, "otherwise => {");
                          llbc_block(os, indent + 2, *m.otherwise);
                          line(os, indent + 1, "}");
                        }
                        line(os, indent, "}");
                      },
                  },
                  s.sw);
            },
        },
        st.kind);
  }

  // -------------------------------------------------------------------------
  // Declarations

  void attributes(std::ostringstream& os, const ItemMeta& meta) {
    for (const auto& a : meta.attributes) os << "#[" << a << "]\n";
  }

  void type_decl(std::ostringstream& os, const TypeDecl& d) {
    binders_ = {&d.generics};
    attributes(os, d.meta);
    std::visit(Overloaded{
                   [&](const StructKind& s) {
                     os << "struct " << d.meta.name << generic_params(d.generics) << where_clauses(d.generics)
                        << " {";
                     for (std::size_t i = 0; i < s.fields.size(); ++i)
                       os << (i ? ", " : " ") << s.fields[i].name << ": " << ty(s.fields[i].ty);
                     os << (s.fields.empty() ? "}\n" : " }\n");
                   },
                   [&](const EnumKind& e) {
                     os << "enum " << d.meta.name << generic_params(d.generics) << where_clauses(d.generics)
                        << " {\n";
                     Int128 next = 0;
                     for (const auto& v : e.variants) {
                       os << "  " << v.name;
                       if (!v.fields.empty())
                         os << "(" << join(v.fields, ", ", [&](const Field& f) { return ty(f.ty); }) << ")";
                       if (v.discriminant != next) os << " = " << int128_to_string(v.discriminant);
                       next = v.discriminant + 1;
                       os << ",\n";
                     }
                     os << "}\n";
                   },
                   [&](const OpaqueKind&) {
                     os << "type " << d.meta.name << generic_params(d.generics) << where_clauses(d.generics)
                        << ";\n";
                   },
               },
               d.kind);
  }

  std::string sig_params(const FunSig& sig, const std::vector<Local>* locals) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < sig.inputs.size(); ++i) {
      std::string prefix;
      std::string name = "_";
      if (locals != nullptr && i + 1 < locals->size()) {
        for (const auto& a : (*locals)[i + 1].attributes) prefix += "#[" + a + "] ";
        name = local_name(LocalId(i + 1));
      }
      parts.push_back(prefix + name + ": " + ty(sig.inputs[i]));
    }
    return "(" + join(parts, ", ", [](const std::string& s) { return s; }) + ") -> " + ty(sig.output);
  }

  void trait_decl(std::ostringstream& os, const TraitDecl& d) {
    binders_ = {&d.generics};
    attributes(os, d.meta);
    os << "trait " << d.meta.name << generic_params(d.generics, 1);
    if (!d.parent_clauses.empty())
      os << ": " << join(d.parent_clauses, " + ", [&](const TraitClause& c) { return bound(c); });
    os << where_clauses(d.generics) << " {\n";
    for (const auto& a : d.assoc_types) {
      os << "  type " << a.name;
      if (!a.clauses.empty()) os << ": " << join(a.clauses, " + ", [&](const TraitClause& c) { return bound(c); });
      os << ";\n";
    }
    for (const auto& m : d.methods) {
      binders_ = {&d.generics, &m.sig.generics};
      set_locals(nullptr);
      os << "  fn " << m.name << generic_params(m.sig.generics) << sig_params(m.sig, nullptr)
         << where_clauses(m.sig.generics) << ";\n";
    }
    os << "}\n";
  }

  void trait_impl(std::ostringstream& os, const TraitImpl& d) {
    binders_ = {&d.generics};
    attributes(os, d.meta);
    GenericArgs rest = d.trait_args;
    Ty self_ty = rest.types.empty() ? Ty::unit() : rest.types[0];
    if (!rest.types.empty()) rest.types.erase(rest.types.begin());
    os << "impl " << d.meta.name << generic_params(d.generics) << ": " << trait_name(d.trait) << args(rest)
       << " for " << ty(self_ty) << where_clauses(d.generics) << " {\n";
    for (const auto& a : d.assoc_types) os << "  type " << a.name << " = " << ty(a.ty) << ";\n";
    for (const auto& m : d.methods) {
      const auto* f = crate_.fun_decl(m.fun);
      os << "  fn " << m.name << " = " << (f ? f->meta.name : "fun" + std::to_string(m.fun.index)) << ";\n";
    }
    os << "}\n";
  }

  void fun_decl(std::ostringstream& os, const FunDecl& d) {
    binders_ = {&d.signature.generics};
    attributes(os, d.meta);
    const std::vector<Local>* locals = nullptr;
    if (const auto* u = std::get_if<ullbc::Body>(&d.body)) locals = &u->locals;
    if (const auto* l = std::get_if<llbc::Body>(&d.body)) locals = &l->locals;
    set_locals(locals);
    os << "fn " << d.meta.name << generic_params(d.signature.generics) << sig_params(d.signature, locals)
       << where_clauses(d.signature.generics);
    if (const auto* u = std::get_if<ullbc::Body>(&d.body)) {
      os << " {\n";
      ullbc_body(os, *u);
      os << "}\n";
    } else if (const auto* l = std::get_if<llbc::Body>(&d.body)) {
      os << " {\n";
      locals_decls(os, l->locals, l->arg_count);
      llbc_block(os, 1, l->body);
      os << "}\n";
    } else {
      os << ";\n";
    }
    set_locals(nullptr);
  }

  std::string crate() {
    std::ostringstream os;
    bool first = true;
    auto sep = [&] {
      if (!first) os << "\n";
      first = false;
    };
    for (const auto& d : crate_.type_decls) sep(), type_decl(os, d);
    for (const auto& d : crate_.trait_decls) sep(), trait_decl(os, d);
    for (const auto& d : crate_.trait_impls) sep(), trait_impl(os, d);
    for (const auto& d : crate_.fun_decls) sep(), fun_decl(os, d);
    return os.str();
  }

 private:
  const TranslatedCrate& crate_;
  std::vector<const GenericParams*> binders_;
  const std::vector<Local>* locals_ = nullptr;
  std::vector<std::string> local_names_;
};

}  // namespace

std::string pretty_print(const TranslatedCrate& crate) { return Printer(crate).crate(); }

std::string print_ty(const TranslatedCrate& crate, const Ty& ty) { return Printer(crate).ty(ty); }

std::string print_trait_ref(const TranslatedCrate& crate, const TraitRefKind& ref) {
  return Printer(crate).trait_ref(ref);
}

std::string print_constant(const TranslatedCrate& crate, const ConstantValue& value) {
  return Printer(crate).constant(value);
}

std::string print_fun(const TranslatedCrate& crate, const FunDecl& fun) {
  std::ostringstream os;
  Printer(crate).fun_decl(os, fun);
  return os.str();
}

}  // namespace charon
