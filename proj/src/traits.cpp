#include "charon/traits.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "charon/frontend.hpp"

namespace charon {

namespace {

// Regions play no part in instance selection.
Ty erase_regions(const Ty& ty);

GenericArgs erase_regions(const GenericArgs& args) {
  GenericArgs out;
  out.regions.assign(args.regions.size(), "_");
  for (const auto& t : args.types) out.types.push_back(erase_regions(t));
  out.const_generics = args.const_generics;
  return out;
}

TraitRefKind erase_regions(const TraitRefKind& ref) {
  return std::visit(Overloaded{
                        [&](const ImplRef& i) { return TraitRefKind::impl(i.id, erase_regions(*i.args)); },
                        [&](const ParentClauseRef& p) { return TraitRefKind::parent(erase_regions(*p.base), p.index); },
                        [&](const ItemClauseRef& p) {
                          return TraitRefKind::item_clause(erase_regions(*p.base), p.item, p.index);
                        },
                        [&](const auto&) { return ref; },
                    },
                    ref.kind);
}

Ty erase_regions(const Ty& ty) {
  return std::visit(Overloaded{
                        [&](const AdtTy& a) { return Ty::adt(a.id, erase_regions(*a.args)); },
                        [&](const RefTy& r) { return Ty{RefTy{"_", Box<Ty>(erase_regions(*r.pointee)), r.mut}}; },
                        [&](const TupleTy& t) {
                          std::vector<Ty> elems;
                          for (const auto& e : t.elems) elems.push_back(erase_regions(e));
                          return Ty::tuple(std::move(elems));
                        },
                        [&](const ArrayTy& a) { return Ty{ArrayTy{Box<Ty>(erase_regions(*a.elem)), a.len}}; },
                        [&](const AssocTy& a) {
                          return Ty{AssocTy{Box<TraitRefKind>(erase_regions(*a.trait_ref)), a.item}};
                        },
                        [&](const auto&) { return ty; },
                    },
                    ty.kind);
}

// Identity of a goal for deduplication and cycle detection.
struct GoalKey {
  TraitDeclId trait;
  std::vector<Ty> types;
  std::vector<ConstGeneric> consts;
  bool operator==(const GoalKey&) const = default;
};

GoalKey key_of(TraitDeclId trait, const GenericArgs& args) {
  GenericArgs e = erase_regions(args);
  return GoalKey{trait, std::move(e.types), std::move(e.const_generics)};
}

std::string describe(const TranslatedCrate& crate, const TraitGoal& goal) {
  const auto* decl = crate.trait_decl(goal.trait);
  std::string out = decl ? decl->meta.name : "Trait" + std::to_string(goal.trait.index);
  out += "<";
  for (std::size_t i = 0; i < goal.args.types.size(); ++i) {
    if (i) out += ", ";
    out += print_ty(crate, goal.args.types[i]);
  }
  return out + ">";
}

Substitution subst_with(const GenericArgs& args, const TraitRefKind* self_ref = nullptr) {
  Substitution s;
  s.args = &args;
  s.self_ref = self_ref;
  return s;
}

// One-way matching of an impl head (impl variables at depth 0) against a goal.
struct Matcher {
  const TraitImpl& impl;
  std::vector<std::optional<Ty>> types;
  std::vector<std::optional<ConstGeneric>> consts;
  std::map<std::string, std::string> regions;

  explicit Matcher(const TraitImpl& i)
      : impl(i), types(i.generics.types.size()), consts(i.generics.const_generics.size()) {}

  bool region(const std::string& pat, const std::string& goal) {
    bool is_param = std::any_of(impl.generics.regions.begin(), impl.generics.regions.end(),
                                [&](const RegionVar& r) { return r.name == pat; });
    if (is_param) regions.emplace(pat, goal);
    return true;
  }

  bool ty(const Ty& pat, const Ty& goal) {
    if (const auto* v = pat.as<TypeVar>(); v != nullptr && v->depth == 0) {
      if (v->index >= types.size()) return false;
      auto& slot = types[v->index];
      if (!slot) {
        slot = goal;
        return true;
      }
      return erase_regions(*slot) == erase_regions(goal);
    }
    if (pat.kind.index() != goal.kind.index()) return false;
    return std::visit(Overloaded{
                          [&](const AdtTy& a) {
                            const auto& g = std::get<AdtTy>(goal.kind);
                            return a.id == g.id && args(*a.args, *g.args);
                          },
                          [&](const RefTy& r) {
                            const auto& g = std::get<RefTy>(goal.kind);
                            return r.mut == g.mut && region(r.region, g.region) && ty(*r.pointee, *g.pointee);
                          },
                          [&](const TupleTy& t) {
                            const auto& g = std::get<TupleTy>(goal.kind);
                            if (t.elems.size() != g.elems.size()) return false;
                            for (std::size_t i = 0; i < t.elems.size(); ++i)
                              if (!ty(t.elems[i], g.elems[i])) return false;
                            return true;
                          },
                          [&](const ArrayTy& a) {
                            const auto& g = std::get<ArrayTy>(goal.kind);
                            return a.len == g.len && ty(*a.elem, *g.elem);
                          },
                          [&](const auto&) { return erase_regions(pat) == erase_regions(goal); },
                      },
                      pat.kind);
  }

  bool konst(const ConstGeneric& pat, const ConstGeneric& goal) {
    if (const auto* v = std::get_if<ConstGenericVarRef>(&pat)) {
      if (v->index >= consts.size()) return false;
      auto& slot = consts[v->index];
      if (!slot) {
        slot = goal;
        return true;
      }
      return *slot == goal;
    }
    return pat == goal;
  }

  bool args(const GenericArgs& pat, const GenericArgs& goal) {
    if (pat.types.size() != goal.types.size() || pat.const_generics.size() != goal.const_generics.size())
      return false;
    for (std::size_t i = 0; i < pat.regions.size() && i < goal.regions.size(); ++i) region(pat.regions[i], goal.regions[i]);
    for (std::size_t i = 0; i < pat.types.size(); ++i)
      if (!ty(pat.types[i], goal.types[i])) return false;
    for (std::size_t i = 0; i < pat.const_generics.size(); ++i)
      if (!konst(pat.const_generics[i], goal.const_generics[i])) return false;
    return true;
  }

  // Instantiation of the impl's parameters; nullopt if some are unconstrained.
  std::optional<GenericArgs> instantiation() const {
    GenericArgs out;
    for (const auto& r : impl.generics.regions) {
      auto it = regions.find(r.name);
      out.regions.push_back(it == regions.end() ? "_" : it->second);
    }
    for (const auto& t : types) {
      if (!t) return std::nullopt;
      out.types.push_back(*t);
    }
    for (const auto& c : consts) {
      if (!c) return std::nullopt;
      out.const_generics.push_back(*c);
    }
    return out;
  }
};

struct Status {
  int count = 0;  // 0, 1, or 2 meaning "two or more"
  TraitRefKind ref;
  std::vector<std::string> candidates;
};

class Solver {
 public:
  Solver(const TranslatedCrate& crate, const GenericParams& params, const ResolveOptions& options)
      : crate_(crate), params_(params), options_(options), closure_(elaborate_implied_clauses(crate, params)) {}

  Status solve(const TraitGoal& raw_goal, std::uint32_t level) {
    Status st;
    if (level > options_.max_depth) return st;
    TraitGoal goal = raw_goal;
    for (auto& t : goal.args.types) t = normalize_assoc_types(crate_, t, params_);
    GoalKey key = key_of(goal.trait, goal.args);
    if (std::find(stack_.begin(), stack_.end(), key) != stack_.end()) return st;
    stack_.push_back(key);

    for (const auto& entry : closure_.clauses) {
      if (entry.clause.trait != goal.trait) continue;
      GenericArgs args = entry.clause.args;
      for (auto& t : args.types) t = normalize_assoc_types(crate_, t, params_);
      if (key_of(entry.clause.trait, args) == key) {
        st.count = 1;
        st.ref = entry.path;
        st.candidates.push_back(print_trait_ref(crate_, entry.path));
        break;
      }
    }

    for (const auto& impl : crate_.trait_impls) {
      if (impl.trait != goal.trait) continue;
      Matcher m(impl);
      if (!m.args(impl.trait_args, goal.args)) continue;
      auto inst = m.instantiation();
      if (!inst) continue;
      int contribution = 1;
      for (const auto& clause : impl.generics.trait_clauses) {
        TraitGoal sub;
        sub.trait = clause.trait;
        try {
          sub.args = substitute(clause.args, subst_with(*inst));
        } catch (const SubstError&) {
          contribution = 0;
          break;
        }
        sub.args.trait_refs.clear();
        Status s = solve(sub, level + 1);
        if (s.count == 0) {
          contribution = 0;
          break;
        }
        if (s.count > 1) contribution = 2;
        inst->trait_refs.push_back(s.ref);
      }
      if (contribution == 0) continue;
      if (st.count == 0) st.ref = TraitRefKind::impl(impl.id, *inst);
      st.count = std::min(2, st.count + contribution);
      st.candidates.push_back("impl " + impl.meta.name);
    }
    stack_.pop_back();
    return st;
  }

 private:
  const TranslatedCrate& crate_;
  const GenericParams& params_;
  ResolveOptions options_;
  ClauseClosure closure_;
  std::vector<GoalKey> stack_;
};

const TraitClause* nth(const std::vector<TraitClause>& clauses, std::uint32_t i) {
  return i < clauses.size() ? &clauses[i] : nullptr;
}

}  // namespace

// ---------------------------------------------------------------------------
// Elaboration

std::optional<TraitGoal> goal_of(const TranslatedCrate& crate, const GenericParams& params, const TraitRefKind& ref) {
  try {
    return std::visit(
        Overloaded{
            [&](const ClauseRef& c) -> std::optional<TraitGoal> {
              const auto* clause = nth(params.trait_clauses, c.id.index);
              if (clause == nullptr) return std::nullopt;
              return TraitGoal{clause->trait, clause->args};
            },
            [&](const ImplRef& i) -> std::optional<TraitGoal> {
              const auto* impl = crate.trait_impl(i.id);
              if (impl == nullptr) return std::nullopt;
              return TraitGoal{impl->trait, substitute(impl->trait_args, subst_with(*i.args))};
            },
            [&](const ParentClauseRef& p) -> std::optional<TraitGoal> {
              auto base = goal_of(crate, params, *p.base);
              if (!base) return std::nullopt;
              const auto* decl = crate.trait_decl(base->trait);
              if (decl == nullptr) return std::nullopt;
              const auto* parent = nth(decl->parent_clauses, p.index);
              if (parent == nullptr) return std::nullopt;
              return TraitGoal{parent->trait, substitute(parent->args, subst_with(base->args, &*p.base))};
            },
            [&](const ItemClauseRef& p) -> std::optional<TraitGoal> {
              auto base = goal_of(crate, params, *p.base);
              if (!base) return std::nullopt;
              const auto* decl = crate.trait_decl(base->trait);
              if (decl == nullptr) return std::nullopt;
              auto it = std::find_if(decl->assoc_types.begin(), decl->assoc_types.end(),
                                     [&](const AssocTypeDecl& a) { return a.name == p.item; });
              if (it == decl->assoc_types.end()) return std::nullopt;
              const auto* clause = nth(it->clauses, p.index);
              if (clause == nullptr) return std::nullopt;
              return TraitGoal{clause->trait, substitute(clause->args, subst_with(base->args, &*p.base))};
            },
            [&](const SelfRef&) -> std::optional<TraitGoal> { return std::nullopt; },
        },
        ref.kind);
  } catch (const SubstError&) {
    return std::nullopt;
  }
}

ClauseClosure elaborate_implied_clauses(const TranslatedCrate& crate, const GenericParams& params) {
  ClauseClosure out;
  std::vector<GoalKey> seen;
  std::deque<std::size_t> queue;
  auto add = [&](ImpliedClause entry) {
    GoalKey key = key_of(entry.clause.trait, entry.clause.args);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
    seen.push_back(std::move(key));
    out.clauses.push_back(std::move(entry));
    queue.push_back(out.clauses.size() - 1);
  };
  for (const auto& c : params.trait_clauses) add(ImpliedClause{TraitRefKind::clause(c.id), c, 0});
  bool reported = false;
  while (!queue.empty()) {
    ImpliedClause entry = out.clauses[queue.front()];
    queue.pop_front();
    const auto* decl = crate.trait_decl(entry.clause.trait);
    if (decl == nullptr) continue;
    bool has_children = !decl->parent_clauses.empty() ||
                        std::any_of(decl->assoc_types.begin(), decl->assoc_types.end(),
                                    [](const AssocTypeDecl& a) { return !a.clauses.empty(); });
    if (entry.depth >= kElaborationDepthCap) {
      if (has_children && !reported) {
        out.diagnostics.push_back(Diagnostic{"clause-depth-exceeded", Span{},
                                             "implied clauses nest deeper than " +
                                                 std::to_string(kElaborationDepthCap) + "; closure truncated",
                                             ""});
        reported = true;
      }
      continue;
    }
    auto s = subst_with(entry.clause.args, &entry.path);
    for (std::uint32_t i = 0; i < decl->parent_clauses.size(); ++i) {
      try {
        TraitClause c = substitute(decl->parent_clauses[i], s);
        add(ImpliedClause{TraitRefKind::parent(entry.path, i), std::move(c), entry.depth + 1});
      } catch (const SubstError&) {
      }
    }
    for (const auto& assoc : decl->assoc_types) {
      for (std::uint32_t k = 0; k < assoc.clauses.size(); ++k) {
        try {
          TraitClause c = substitute(assoc.clauses[k], s);
          add(ImpliedClause{TraitRefKind::item_clause(entry.path, assoc.name, k), std::move(c), entry.depth + 1});
        } catch (const SubstError&) {
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resolution

TraitRefKind resolve_trait_ref(const TranslatedCrate& crate, const GenericParams& params, const TraitGoal& goal,
                               const ResolveOptions& options) {
  Solver solver(crate, params, options);
  Status st = solver.solve(goal, 1);
  if (st.count == 0) throw Error("no-instance", "no instance found for " + describe(crate, goal));
  if (st.count > 1) {
    std::string list;
    for (const auto& c : st.candidates) list += (list.empty() ? "" : ", ") + c;
    throw Error("ambiguous-instance", "several instances of " + describe(crate, goal) + ": " + list);
  }
  return st.ref;
}

std::uint32_t derivation_depth(const TraitRefKind& ref) {
  const auto* impl = ref.as<ImplRef>();
  if (impl == nullptr) return 1;
  std::uint32_t deepest = 0;
  for (const auto& sub : impl->args->trait_refs) deepest = std::max(deepest, derivation_depth(sub));
  return 1 + deepest;
}

std::string verify_derivation(const TranslatedCrate& crate, const GenericParams& params, const TraitGoal& goal,
                              const TraitRefKind& ref) {
  auto normalized = [&](GenericArgs args) {
    for (auto& t : args.types) t = normalize_assoc_types(crate, t, params);
    return key_of(TraitDeclId(), args);
  };
  auto proved = goal_of(crate, params, ref);
  if (!proved) return "reference " + print_trait_ref(crate, ref) + " does not name an instance";
  if (proved->trait != goal.trait) return "reference proves a different trait";
  if (normalized(proved->args) != normalized(goal.args))
    return print_trait_ref(crate, ref) + " proves " + describe(crate, *proved) + ", not " + describe(crate, goal);
  const auto* impl_ref = ref.as<ImplRef>();
  if (impl_ref == nullptr) return "";
  const auto* impl = crate.trait_impl(impl_ref->id);
  const auto& args = *impl_ref->args;
  if (args.types.size() != impl->generics.types.size() ||
      args.const_generics.size() != impl->generics.const_generics.size())
    return "wrong number of arguments for impl " + impl->meta.name;
  if (args.trait_refs.size() != impl->generics.trait_clauses.size())
    return "impl " + impl->meta.name + " needs " + std::to_string(impl->generics.trait_clauses.size()) +
           " where-clause instances";
  for (std::size_t k = 0; k < impl->generics.trait_clauses.size(); ++k) {
    const auto& clause = impl->generics.trait_clauses[k];
    TraitGoal sub{clause.trait, substitute(clause.args, subst_with(args))};
    std::string why = verify_derivation(crate, params, sub, args.trait_refs[k]);
    if (!why.empty()) return why;
  }
  return "";
}

std::pair<GenericArgs, GenericArgs> split_method_generics(const GenericArgs& full, const GenericParams& container) {
  auto underflow = [](const char* what, std::size_t have, std::size_t need) {
    throw Error("truncation-underflow", std::string("call provides ") + std::to_string(have) + " " + what +
                                           " but the container expects at least " + std::to_string(need));
  };
  if (full.regions.size() < container.regions.size()) underflow("regions", full.regions.size(), container.regions.size());
  if (full.types.size() < container.types.size()) underflow("types", full.types.size(), container.types.size());
  if (full.const_generics.size() < container.const_generics.size())
    underflow("const generics", full.const_generics.size(), container.const_generics.size());
  if (!full.trait_refs.empty() && full.trait_refs.size() < container.trait_clauses.size())
    underflow("trait references", full.trait_refs.size(), container.trait_clauses.size());
  GenericArgs head, tail;
  auto split = [](const auto& all, std::size_t n, auto& a, auto& b) {
    a.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    b.assign(all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
  };
  split(full.regions, container.regions.size(), head.regions, tail.regions);
  split(full.types, container.types.size(), head.types, tail.types);
  split(full.const_generics, container.const_generics.size(), head.const_generics, tail.const_generics);
  if (!full.trait_refs.empty())
    split(full.trait_refs, container.trait_clauses.size(), head.trait_refs, tail.trait_refs);
  return {head, tail};
}

Ty normalize_assoc_types(const TranslatedCrate& crate, const Ty& ty, const GenericParams& params) {
  int rewrites = 0;
  std::function<Ty(const Ty&)> norm;
  std::function<GenericArgs(const GenericArgs&)> norm_args = [&](const GenericArgs& a) {
    GenericArgs out = a;
    for (auto& t : out.types) t = norm(t);
    return out;
  };
  std::function<TraitRefKind(const TraitRefKind&)> norm_ref = [&](const TraitRefKind& r) {
    return std::visit(Overloaded{
                          [&](const ImplRef& i) { return TraitRefKind::impl(i.id, norm_args(*i.args)); },
                          [&](const ParentClauseRef& p) { return TraitRefKind::parent(norm_ref(*p.base), p.index); },
                          [&](const ItemClauseRef& p) {
                            return TraitRefKind::item_clause(norm_ref(*p.base), p.item, p.index);
                          },
                          [&](const auto&) { return r; },
                      },
                      r.kind);
  };
  auto rewrite = [&](const Ty& replacement) {
    if (++rewrites > 64)
      throw Error("normalization-diverged", "associated type normalization did not terminate after 64 rewrites");
    return norm(replacement);
  };
  norm = [&](const Ty& t) -> Ty {
    return std::visit(
        Overloaded{
            [&](const AdtTy& a) { return Ty::adt(a.id, norm_args(*a.args)); },
            [&](const RefTy& r) { return Ty{RefTy{r.region, Box<Ty>(norm(*r.pointee)), r.mut}}; },
            [&](const TupleTy& tup) {
              std::vector<Ty> elems;
              for (const auto& e : tup.elems) elems.push_back(norm(e));
              return Ty::tuple(std::move(elems));
            },
            [&](const ArrayTy& a) { return Ty{ArrayTy{Box<Ty>(norm(*a.elem)), a.len}}; },
            [&](const AssocTy& a) -> Ty {
              TraitRefKind ref = norm_ref(*a.trait_ref);
              for (const auto& c : params.trait_type_constraints)
                if (c.item == a.item && c.trait_ref == ref) return rewrite(c.ty);
              if (const auto* impl_ref = ref.as<ImplRef>()) {
                if (const auto* impl = crate.trait_impl(impl_ref->id)) {
                  for (const auto& assoc : impl->assoc_types) {
                    if (assoc.name != a.item) continue;
                    Ty value;
                    try {
                      value = substitute(assoc.ty, subst_with(*impl_ref->args));
                    } catch (const SubstError&) {
                      break;
                    }
                    return rewrite(value);
                  }
                }
              }
              return Ty{AssocTy{Box<TraitRefKind>(std::move(ref)), a.item}};
            },
            [&](const auto&) { return t; },
        },
        t.kind);
  };
  return norm(ty);
}

ImplRef concretize_trait_ref(const TranslatedCrate& crate, const TraitRefKind& ref) {
  static const GenericParams kEmpty;
  if (const auto* impl = ref.as<ImplRef>()) return *impl;
  auto via_base = [&](const TraitRefKind& base, auto rebuild) -> ImplRef {
    ImplRef b = concretize_trait_ref(crate, base);
    TraitRefKind path = rebuild(TraitRefKind{b});
    auto goal = goal_of(crate, kEmpty, path);
    if (!goal) throw Error("no-instance", "trait reference " + print_trait_ref(crate, ref) + " names no clause");
    goal->args.trait_refs.clear();
    TraitRefKind found = resolve_trait_ref(crate, kEmpty, *goal);
    return concretize_trait_ref(crate, found);
  };
  if (const auto* p = ref.as<ParentClauseRef>())
    return via_base(*p->base, [&](TraitRefKind b) { return TraitRefKind::parent(std::move(b), p->index); });
  if (const auto* p = ref.as<ItemClauseRef>())
    return via_base(*p->base, [&](TraitRefKind b) { return TraitRefKind::item_clause(std::move(b), p->item, p->index); });
  throw Error("no-instance", "trait reference " + print_trait_ref(crate, ref) + " is not ground");
}

// ---------------------------------------------------------------------------
// Call sites

namespace {

class CallResolver {
 public:
  CallResolver(const TranslatedCrate& crate, const FunDecl& fun, Diagnostics& diags)
      : crate_(crate), fun_(fun), diags_(diags) {}

  void call(Call& c, const Span& span) {
    auto* fp = std::get_if<FnPtr>(&c.func);
    if (fp == nullptr) return;
    try {
      if (const auto* f = std::get_if<FunRef>(&fp->func)) {
        const FunDecl* callee = crate_.fun_decl(f->id);
        if (callee == nullptr || !fp->generics.trait_refs.empty()) return;
        for (const auto& clause : callee->signature.generics.trait_clauses) {
          TraitGoal goal{clause.trait, substitute(clause.args, subst_with(fp->generics))};
          goal.args.trait_refs.clear();
          fp->generics.trait_refs.push_back(resolve(goal));
        }
      } else if (const auto* u = std::get_if<UnresolvedMethodRef>(&fp->func)) {
        const TraitDecl* trait = crate_.trait_decl(u->trait);
        if (trait == nullptr) return;
        auto method = std::find_if(trait->methods.begin(), trait->methods.end(),
                                   [&](const TraitMethodDecl& m) { return m.name == u->method; });
        if (method == trait->methods.end())
          throw Error("no-instance", "trait " + trait->meta.name + " has no method " + u->method);
        auto [container, method_args] = split_method_generics(fp->generics, trait->generics);
        container.trait_refs.clear();
        method_args.trait_refs.clear();
        TraitRefKind instance = resolve(TraitGoal{u->trait, container});
        for (const auto& clause : method->sig.generics.trait_clauses) {
          GenericArgs inner = substitute(clause.args, subst_with(method_args));
          GenericArgs outer = substitute(inner, subst_with(container, &instance));
          outer.trait_refs.clear();
          method_args.trait_refs.push_back(resolve(TraitGoal{clause.trait, outer}));
        }
        FnPtr resolved;
        resolved.func = TraitMethodRef{instance, u->method};
        resolved.generics = std::move(method_args);
        *fp = std::move(resolved);
      }
    } catch (const Error& e) {
      diags_.push_back(Diagnostic{e.code(), span, e.what(), fun_.meta.name});
      if (auto* f = std::get_if<FunRef>(&fp->func)) {
        (void)f;
        fp->generics.trait_refs.clear();
      }
    }
  }

  void block(llbc::Block& b) {
    for (auto& st : b.statements) {
      std::visit(Overloaded{
                     [&](llbc::CallStmt& c) { call(c.call, st.span); },
                     [&](llbc::Loop& l) { block(l.body); },
                     [&](llbc::SwitchStmt& s) {
                       std::visit(Overloaded{
                                      [&](llbc::If& i) {
                                        block(i.then_block);
                                        block(i.else_block);
                                      },
                                      [&](llbc::SwitchInt& sw) {
                                        for (auto& arm : sw.arms) block(arm.second);
                                        block(sw.otherwise);
                                      },
                                      [&](llbc::Match& m) {
                                        for (auto& arm : m.arms) block(arm.second);
                                        if (m.otherwise) block(*m.otherwise);
                                      },
                                  },
                                  s.sw);
                     },
                     [](auto&) {},
                 },
                 st.kind);
    }
  }

 private:
  TraitRefKind resolve(const TraitGoal& goal) { return resolve_trait_ref(crate_, fun_.signature.generics, goal); }

  const TranslatedCrate& crate_;
  const FunDecl& fun_;
  Diagnostics& diags_;
};

}  // namespace

Diagnostics resolve_calls(TranslatedCrate& crate) {
  Diagnostics diags;
  for (std::size_t i = 0; i < crate.fun_decls.size(); ++i) {
    // Work on a copy so the resolver can read the crate while the body changes.
    FunDecl fun = crate.fun_decls[i];
    CallResolver resolver(crate, fun, diags);
    if (auto* u = std::get_if<ullbc::Body>(&fun.body)) {
      for (auto& bb : u->blocks)
        if (auto* c = std::get_if<ullbc::CallTerm>(&bb.terminator.kind)) resolver.call(c->call, bb.terminator.span);
    } else if (auto* l = std::get_if<llbc::Body>(&fun.body)) {
      resolver.block(l->body);
    } else {
      continue;
    }
    crate.fun_decls[i].body = std::move(fun.body);
  }
  return diags;
}

}  // namespace charon
