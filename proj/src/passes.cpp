#include "charon/passes.hpp"

#include "charon/traits.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>

#include "charon/deps.hpp"
#include "walk.hpp"

namespace charon {

std::set<std::string> default_panic_functions() {
  return {"core::panicking::panic", "core::panicking::panic_fmt", "std::panic::begin_panic"};
}

namespace {

std::size_t count_local_uses(ullbc::Body& body, LocalId id) {
  std::size_t n = 0;
  detail::Walker w;
  w.on_place = [&](Place& p) { n += p.local == id; };
  w.body(body);
  return n;
}

// `t.fN` read by copy or move.
bool is_field_read(const Operand& op, LocalId t, std::uint32_t field) {
  const Place* p = op.place();
  if (p == nullptr || p->local != t || p->projection.size() != 1) return false;
  const auto* f = std::get_if<FieldProj>(&p->projection[0]);
  return f != nullptr && f->field == field;
}

std::vector<std::size_t> predecessor_counts(const ullbc::Body& body) {
  std::vector<std::size_t> preds(body.blocks.size(), 0);
  for (const auto& bb : body.blocks)
    for (auto s : ullbc::successors(bb.terminator))
      if (s.index < preds.size()) ++preds[s.index];
  return preds;
}

BinOp unchecked(BinOp op) {
  switch (op) {
    case BinOp::CheckedAdd: return BinOp::Add;
    case BinOp::CheckedSub: return BinOp::Sub;
    case BinOp::CheckedMul: return BinOp::Mul;
    default: return op;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Body utilities

std::size_t prune_unreachable(ullbc::Body& body) {
  if (body.blocks.empty()) return 0;
  std::vector<bool> seen(body.blocks.size(), false);
  std::vector<std::uint32_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    auto b = stack.back();
    stack.pop_back();
    for (auto s : ullbc::successors(body.blocks[b].terminator)) {
      if (s.index < seen.size() && !seen[s.index]) {
        seen[s.index] = true;
        stack.push_back(s.index);
      }
    }
  }
  std::vector<std::uint32_t> remap(body.blocks.size(), 0);
  std::vector<ullbc::BasicBlock> kept;
  for (std::size_t b = 0; b < body.blocks.size(); ++b) {
    if (!seen[b]) continue;
    remap[b] = static_cast<std::uint32_t>(kept.size());
    kept.push_back(std::move(body.blocks[b]));
  }
  std::size_t removed = body.blocks.size() - kept.size();
  body.blocks = std::move(kept);
  if (removed == 0) return 0;
  auto fix = [&](BlockId& id) { id = BlockId(remap[id.index]); };
  for (auto& bb : body.blocks) {
    std::visit(Overloaded{
                   [&](ullbc::Goto& g) { fix(g.target); },
                   [&](ullbc::SwitchInt& s) {
                     for (auto& c : s.cases) fix(c.second);
                     fix(s.otherwise);
                   },
                   [&](ullbc::Match& m) {
                     for (auto& c : m.cases) fix(c.second);
                     if (m.otherwise) fix(*m.otherwise);
                   },
                   [&](ullbc::Assert& a) { fix(a.target); },
                   [&](ullbc::CallTerm& c) { fix(c.target); },
                   [](auto&) {},
               },
               bb.terminator.kind);
  }
  return removed;
}

void remove_local(ullbc::Body& body, LocalId id) {
  if (id.index >= body.locals.size()) return;
  body.locals.erase(body.locals.begin() + id.index);
  for (std::size_t i = id.index; i < body.locals.size(); ++i) body.locals[i].id = LocalId(i);
  detail::Walker w;
  w.on_place = [&](Place& p) {
    if (p.local.index > id.index) p.local = LocalId(p.local.index - 1);
  };
  w.body(body);
}

// ---------------------------------------------------------------------------
// Checked arithmetic

void fuse_checked_arith(ullbc::Body& body) {
  bool changed = true;
  while (changed) {
    changed = false;
    auto preds = predecessor_counts(body);
    for (std::size_t b = 0; b < body.blocks.size() && !changed; ++b) {
      auto& bb = body.blocks[b];
      if (bb.statements.empty()) continue;
      auto* assign = std::get_if<Assign>(&bb.statements.back().kind);
      if (assign == nullptr || !assign->dest.projection.empty()) continue;
      auto* bin = std::get_if<BinaryRv>(&assign->value.kind);
      if (bin == nullptr || !is_checked(bin->op)) continue;
      auto* as = std::get_if<ullbc::Assert>(&bb.terminator.kind);
      if (as == nullptr || as->expected) continue;
      LocalId t = assign->dest.local;
      if (t.index <= body.arg_count) continue;
      if (!is_field_read(as->cond, t, 1)) continue;
      BlockId k = as->target;
      if (k.index == b || preds[k.index] != 1) continue;
      auto& kb = body.blocks[k.index];
      if (kb.statements.empty()) continue;
      auto* use = std::get_if<Assign>(&kb.statements.front().kind);
      if (use == nullptr) continue;
      auto* use_rv = std::get_if<UseRv>(&use->value.kind);
      if (use_rv == nullptr || !is_field_read(use_rv->op, t, 0)) continue;
      if (use->dest.local == t) continue;
      if (count_local_uses(body, t) != 3) continue;

      ullbc::Statement fused = kb.statements.front();
      std::get<Assign>(fused.kind).value = Rvalue{BinaryRv{unchecked(bin->op), bin->lhs, bin->rhs}};
      const ullbc::Statement& original = bb.statements.back();
      fused.span = original.span;
      fused.comments = original.comments;
      for (const auto& c : kb.statements.front().comments) fused.comments.push_back(c);
      for (const auto& a : original.attributes)
        if (std::find(fused.attributes.begin(), fused.attributes.end(), a) == fused.attributes.end())
          fused.attributes.push_back(a);
      bb.statements.back() = std::move(fused);
      Span term_span = bb.terminator.span;
      bb.terminator = ullbc::Terminator{term_span, bb.terminator.comments, ullbc::Goto{k}};
      kb.statements.erase(kb.statements.begin());
      remove_local(body, t);
      changed = true;
    }
  }
}

// ---------------------------------------------------------------------------
// Panics

void unify_panics(const TranslatedCrate& crate, ullbc::Body& body, const std::set<std::string>& panic_functions) {
  for (auto& bb : body.blocks) {
    auto& term = bb.terminator;
    if (std::holds_alternative<ullbc::Unreachable>(term.kind)) {
      term.kind = ullbc::Abort{AbortKind::UndefinedBehavior};
    } else if (auto* c = std::get_if<ullbc::CallTerm>(&term.kind)) {
      const auto* fp = std::get_if<FnPtr>(&c->call.func);
      if (fp == nullptr) continue;
      const auto* fr = std::get_if<FunRef>(&fp->func);
      if (fr == nullptr) continue;
      const FunDecl* callee = crate.fun_decl(fr->id);
      if (callee != nullptr && panic_functions.count(callee->meta.name)) term.kind = ullbc::Abort{AbortKind::Panic};
    }
  }
  prune_unreachable(body);
}

// ---------------------------------------------------------------------------
// Matches

Diagnostics reconstruct_matches(const TranslatedCrate& crate, ullbc::Body& body) {
  Diagnostics diags;
  struct Site {
    std::size_t block;
    LocalId temp;
  };
  std::vector<Site> sites;
  bool changed = false;
  ullbc::Body work = body;
  for (std::size_t b = 0; b < work.blocks.size(); ++b) {
    auto& bb = work.blocks[b];
    if (bb.statements.empty()) continue;
    const auto* assign = std::get_if<Assign>(&bb.statements.back().kind);
    if (assign == nullptr || !assign->dest.projection.empty()) continue;
    const auto* discr = std::get_if<DiscriminantRv>(&assign->value.kind);
    if (discr == nullptr) continue;
    const auto* sw = std::get_if<ullbc::SwitchInt>(&bb.terminator.kind);
    if (sw == nullptr) continue;
    const Place* sp = sw->discr.place();
    LocalId d = assign->dest.local;
    if (sp == nullptr || sp->local != d || !sp->projection.empty() || d.index <= work.arg_count) continue;
    if (discr->place.local == d) continue;
    Ty scrut_ty;
    try {
      scrut_ty = place_type(crate, work.locals, discr->place);
    } catch (const Error&) {
      continue;
    }
    const EnumKind* en = enum_kind(crate, scrut_ty);
    if (en == nullptr) continue;
    // a temporary read elsewhere keeps its assignment; the switch still becomes a match
    bool only_switch = count_local_uses(work, d) == 2;

    ullbc::Match m;
    m.scrutinee = discr->place;
    std::set<std::uint32_t> covered;
    bool bad = false;
    for (const auto& [value, target] : sw->cases) {
      auto it = std::find_if(en->variants.begin(), en->variants.end(),
                             [&](const Variant& v) { return v.discriminant == value; });
      if (it == en->variants.end()) {
        diags.push_back(Diagnostic{"bad-discriminant", bb.terminator.span,
                                   "case value " + int128_to_string(value) + " matches no variant", ""});
        bad = true;
        break;
      }
      auto vid = static_cast<std::uint32_t>(it - en->variants.begin());
      if (!covered.insert(vid).second) continue;
      m.cases.emplace_back(VariantId(vid), target);
    }
    if (bad) return diags;
    if (covered.size() < en->variants.size()) m.otherwise = sw->otherwise;
    ullbc::Terminator term{bb.terminator.span, bb.terminator.comments, std::move(m)};
    if (only_switch) {
      auto stmt_comments = bb.statements.back().comments;
      term.comments.insert(term.comments.begin(), stmt_comments.begin(), stmt_comments.end());
      bb.statements.pop_back();
      sites.push_back(Site{b, d});
    }
    bb.terminator = std::move(term);
    changed = true;
  }
  if (!changed) return diags;
  // Remove temporaries from the highest index down so earlier ids stay valid.
  std::vector<LocalId> temps;
  for (const auto& s : sites) temps.push_back(s.temp);
  std::sort(temps.begin(), temps.end(), [](LocalId a, LocalId b) { return a.index > b.index; });
  temps.erase(std::unique(temps.begin(), temps.end()), temps.end());
  for (auto t : temps) remove_local(work, t);
  prune_unreachable(work);
  body = std::move(work);
  return diags;
}

// ---------------------------------------------------------------------------
// Constants

namespace {

[[noreturn]] void encode_fail(const std::string& msg) { throw Error("encode-error", msg); }
[[noreturn]] void decode_fail(const std::string& msg) { throw Error("decode-error", msg); }

void encode_into(const TranslatedCrate& crate, const ConstantValue& value, std::vector<std::uint8_t>& out) {
  std::visit(Overloaded{
                 [&](const ScalarConst& s) {
                   const auto* st = value.ty.as<ScalarTy>();
                   if (st == nullptr) encode_fail("scalar constant of a non-scalar type");
                   if (!scalar_fits(st->kind, s.value))
                     encode_fail(int128_to_string(s.value) + " does not fit in " + to_string(st->kind));
                   auto bits = static_cast<unsigned __int128>(s.value);
                   for (unsigned i = 0; i < bit_width(st->kind) / 8; ++i)
                     out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
                 },
                 [&](const BoolConst& b) {
                   if (!value.ty.is<BoolTy>()) encode_fail("bool constant of a non-bool type");
                   out.push_back(b.value ? 1 : 0);
                 },
                 [&](const AdtConst& a) {
                   const EnumKind* en = enum_kind(crate, value.ty);
                   if (en != nullptr) {
                     if (!a.variant || a.variant->index >= en->variants.size()) encode_fail("enum constant without a valid variant");
                     if (a.variant->index > 255) encode_fail("enum has too many variants for a one-byte tag");
                     out.push_back(static_cast<std::uint8_t>(a.variant->index));
                   } else if (a.variant) {
                     encode_fail("variant on a non-enum constant");
                   }
                   std::vector<Ty> tys;
                   try {
                     tys = field_types(crate, value.ty, a.variant);
                   } catch (const Error& e) {
                     encode_fail(e.what());
                   }
                   if (const auto* arr = value.ty.as<ArrayTy>()) {
                     if (a.fields.size() != arr->len) encode_fail("array constant length mismatch");
                   } else if (tys.size() != a.fields.size()) {
                     encode_fail("field count mismatch");
                   }
                   for (const auto& f : a.fields) encode_into(crate, f, out);
                 },
                 [&](const RawConst& r) { out.insert(out.end(), r.bytes.begin(), r.bytes.end()); },
             },
             value.kind);
}

struct Decoder {
  const TranslatedCrate& crate;
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;
  int depth = 0;

  std::uint8_t byte() {
    if (pos >= bytes.size()) decode_fail("constant is shorter than its type requires");
    return bytes[pos++];
  }

  ConstantValue decode(const Ty& ty) {
    if (++depth > 64) decode_fail("constant type nests too deeply");
    ConstantValue out = decode_inner(ty);
    --depth;
    return out;
  }

  ConstantValue decode_inner(const Ty& ty) {
    if (const auto* s = ty.as<ScalarTy>()) {
      unsigned width = bit_width(s->kind);
      unsigned __int128 bits = 0;
      for (unsigned i = 0; i < width / 8; ++i) bits |= static_cast<unsigned __int128>(byte()) << (8 * i);
      Int128 v = static_cast<Int128>(bits);
      if (is_signed(s->kind) && (bits >> (width - 1)) & 1) v -= static_cast<Int128>(1) << width;
      return ConstantValue::scalar(s->kind, v);
    }
    if (ty.is<BoolTy>()) {
      auto b = byte();
      if (b > 1) decode_fail("invalid bool byte " + std::to_string(b));
      return ConstantValue::boolean(b == 1);
    }
    AdtConst value;
    if (const auto* arr = ty.as<ArrayTy>()) {
      for (std::uint64_t i = 0; i < arr->len; ++i) value.fields.push_back(decode(*arr->elem));
      return ConstantValue{ty, std::move(value)};
    }
    if (ty.is<TupleTy>() || ty.is<AdtTy>()) {
      const EnumKind* en = enum_kind(crate, ty);
      if (en != nullptr) {
        auto tag = byte();
        if (tag >= en->variants.size()) decode_fail("invalid enum tag " + std::to_string(tag));
        value.variant = VariantId(tag);
      } else if (const auto* adt = ty.as<AdtTy>()) {
        const TypeDecl* decl = crate.type_decl(adt->id);
        if (decl == nullptr || std::holds_alternative<OpaqueKind>(decl->kind))
          decode_fail("cannot decode a constant of an opaque type");
      }
      std::vector<Ty> tys;
      try {
        tys = field_types(crate, ty, value.variant);
      } catch (const Error& e) {
        decode_fail(e.what());
      }
      for (const auto& t : tys) value.fields.push_back(decode(t));
      return ConstantValue{ty, std::move(value)};
    }
    decode_fail("cannot decode a constant of this type");
  }
};

}  // namespace

std::vector<std::uint8_t> encode_constant(const TranslatedCrate& crate, const ConstantValue& value) {
  std::vector<std::uint8_t> out;
  encode_into(crate, value, out);
  return out;
}

ConstantValue decode_constant(const TranslatedCrate& crate, const Ty& ty, const std::vector<std::uint8_t>& bytes) {
  Decoder d{crate, bytes};
  ConstantValue v = d.decode(ty);
  if (d.pos != bytes.size())
    decode_fail("constant has " + std::to_string(bytes.size() - d.pos) + " trailing bytes");
  return v;
}

Diagnostics decode_constants(TranslatedCrate& crate) {
  Diagnostics diags;
  for (auto& fun : crate.fun_decls) {
    auto* body = std::get_if<ullbc::Body>(&fun.body);
    auto* lbody = std::get_if<llbc::Body>(&fun.body);
    if (body == nullptr && lbody == nullptr) continue;
    std::optional<Diagnostic> failure;
    detail::Walker w;
    w.on_operand = [&](Operand& op) {
      auto* c = std::get_if<ConstOp>(&op.kind);
      if (c == nullptr || failure) return;
      const auto* raw = std::get_if<RawConst>(&c->value.kind);
      if (raw == nullptr) return;
      try {
        c->value = decode_constant(crate, c->value.ty, raw->bytes);
      } catch (const Error& e) {
        failure = Diagnostic{"decode-error", body ? body->span : lbody->span, e.what(), fun.meta.name};
      }
    };
    // Statement spans are more precise; record the enclosing statement when it fails.
    if (body != nullptr) {
      for (auto& bb : body->blocks) {
        for (auto& st : bb.statements) {
          w.shared(st.kind);
          if (failure && failure->span == body->span) failure->span = st.span;
        }
        w.terminator(bb.terminator);
        if (failure && failure->span == body->span) failure->span = bb.terminator.span;
        if (failure) break;
      }
    } else {
      w.body(*lbody);
    }
    if (failure) {
      diags.push_back(*failure);
      fun.body = OpaqueBody{};
    }
  }
  return diags;
}

// ---------------------------------------------------------------------------
// Declaration groups

std::vector<DeclGroup> compute_decl_groups(const TranslatedCrate& crate) {
  auto ids = all_decl_ids(crate);
  std::map<AnyDeclId, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
  std::size_t n = ids.size();
  std::vector<std::vector<std::size_t>> edges(n);
  std::vector<bool> self_edge(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& dep : decl_dependencies(crate, ids[i])) {
      auto it = index.find(dep);
      if (it == index.end()) continue;
      if (it->second == i) self_edge[i] = true;
      edges[i].push_back(it->second);
    }
  }

  // Tarjan, iterative to stay safe on long dependency chains.
  std::vector<int> order(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  int counter = 0, ncomp = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (order[root] != -1) continue;
    std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < edges[v].size()) {
        std::size_t w = edges[v][next++];
        if (order[w] == -1) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      if (low[v] == order[v]) {
        while (true) {
          std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
      std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
    }
  }

  std::vector<std::vector<std::size_t>> members(ncomp);
  for (std::size_t i = 0; i < n; ++i) members[comp[i]].push_back(i);
  // A group is ready once every group it depends on has been emitted.
  std::vector<std::set<int>> deps(ncomp), users(ncomp);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : edges[i])
      if (comp[i] != comp[j]) {
        deps[comp[i]].insert(comp[j]);
        users[comp[j]].insert(comp[i]);
      }
  using Entry = std::pair<std::size_t, int>;  // (smallest member, group)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  std::vector<std::size_t> missing(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    missing[c] = deps[c].size();
    if (missing[c] == 0) ready.emplace(members[c].front(), c);
  }
  std::vector<DeclGroup> groups;
  while (!ready.empty()) {
    int c = ready.top().second;
    ready.pop();
    DeclGroup g;
    g.recursive = members[c].size() > 1 || self_edge[members[c].front()];
    for (auto i : members[c]) g.members.push_back(ids[i]);
    groups.push_back(std::move(g));
    for (int u : users[c])
      if (--missing[u] == 0) ready.emplace(members[u].front(), u);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Pipeline

Diagnostics run_pipeline(TranslatedCrate& crate, const PassConfig& config) {
  Diagnostics diags;
  auto for_each_body = [&](const std::function<void(FunDecl&, ullbc::Body&)>& f) {
    for (auto& fun : crate.fun_decls)
      if (auto* body = std::get_if<ullbc::Body>(&fun.body)) f(fun, *body);
  };
  if (config.unify_panics)
    for_each_body([&](FunDecl&, ullbc::Body& body) { unify_panics(crate, body, config.panic_functions); });
  if (config.fuse_checked_arith) for_each_body([&](FunDecl&, ullbc::Body& body) { fuse_checked_arith(body); });
  if (config.reconstruct_matches) {
    for_each_body([&](FunDecl& fun, ullbc::Body& body) {
      ullbc::Body copy = body;
      for (auto d : reconstruct_matches(crate, copy)) {
        d.item = fun.meta.name;
        diags.push_back(std::move(d));
      }
      body = std::move(copy);
    });
  }
  if (config.decode_constants)
    for (auto& d : decode_constants(crate)) diags.push_back(std::move(d));
  if (config.resolve_calls)
    for (auto& d : resolve_calls(crate)) diags.push_back(std::move(d));
  if (config.decl_groups) crate.decl_groups = compute_decl_groups(crate);
  return diags;
}

}  // namespace charon
