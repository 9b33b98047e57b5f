#include "gen.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "charon/frontend.hpp"
#include "oracles.hpp"

using namespace charon;

namespace gen {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

Int128 random_int(Rng& rng, ScalarKind k) {
  Int128 lo = scalar_min(k), hi = scalar_max(k);
  switch (uniform(rng, 0, 9)) {
    case 0: return lo;
    case 1: return hi;
    case 2: return is_signed(k) ? -1 : hi - 1;
    case 3:
    case 4:
    case 5: return std::min<Int128>(hi, uniform(rng, 0, 12));
    case 6: return is_signed(k) ? -uniform(rng, 1, 12) : uniform(rng, 0, 3);
    default: {
      // uniform over the whole range
      auto u = static_cast<Int128>(std::uniform_int_distribution<std::uint64_t>()(rng));
      Int128 span = hi - lo + 1;
      return lo + (u % span + span) % span;
    }
  }
}

std::string lit(Int128 v, ScalarKind k) { return int128_to_string(v) + to_string(k); }

// ---------------------------------------------------------------------------
// CFG programs

class CfgWriter {
 public:
  CfgWriter(Rng& rng, const CfgOptions& o) : rng_(rng), o_(o) {}

  std::string run() {
    kind_ = pick(rng_, std::vector<ScalarKind>{ScalarKind::U8, ScalarKind::I8, ScalarKind::U16, ScalarKind::I32,
                                               ScalarKind::U32, ScalarKind::I64});
    k_ = to_string(kind_);
    params_ = uniform(rng_, 1, 3);
    blocks_ = uniform(rng_, 2, o_.max_blocks);
    prefix_.assign(static_cast<std::size_t>(blocks_), "");

    std::ostringstream os;
    if (o_.prelude) {
      os << "enum Opt<T> { None, Some(T) }\n";
      os << "fn core::panicking::panic();\n";
    }
    os << "fn " << o_.name << "_helper(a: " << k_ << ") -> " << k_ << " {\n"
       << "  bb0: { ret = wrapping_mul copy a, const 3" << k_ << "; ret = bitxor copy ret, const 5" << k_
       << "; return }\n}\n";
    os << "fn " << o_.name << "(";
    for (int i = 0; i < params_; ++i) os << (i ? ", " : "") << "p" << i << ": " << k_;
    os << ") -> " << k_ << " {\n";
    for (int i = 0; i < 4; ++i) os << "  let x" << i << ": " << k_ << ";\n";
    os << "  let c: bool;\n  let t: (" << k_ << ", bool);\n  let o: Opt<" << k_ << ">;\n  let d: i64;\n  let z: ();\n";
    for (int b = 0; b < blocks_; ++b) os << "  " << block(b) << "\n";
    os << "}\n";
    return os.str();
  }

 private:
  std::string var() {
    int n = uniform(rng_, 0, params_ + 3);
    return n < params_ ? "p" + std::to_string(n) : "x" + std::to_string(n - params_);
  }
  std::string dest() { return "x" + std::to_string(uniform(rng_, 0, 3)); }
  std::string operand() {
    if (chance(rng_, 0.3)) return "const " + lit(random_int(rng_, kind_), kind_);
    return "copy " + var();
  }
  std::string small_const() {
    return "const " + lit(uniform(rng_, 0, 12), kind_);
  }

  std::size_t target(int from) {
    if (chance(rng_, o_.back_edge) || from + 1 >= blocks_) return static_cast<std::size_t>(uniform(rng_, 0, from));
    // mostly fall through to the next block so that most blocks are reachable
    if (chance(rng_, 0.5)) return static_cast<std::size_t>(from + 1);
    return static_cast<std::size_t>(uniform(rng_, from + 1, blocks_ - 1));
  }
  std::string bb(std::size_t b) { return "bb" + std::to_string(b); }

  std::string statement() {
    switch (uniform(rng_, 0, 11)) {
      case 0:
      case 1:
      case 2: {
        static const std::vector<std::string> ops = {"wrapping_add", "wrapping_sub", "wrapping_mul", "bitand",
                                                     "bitor",        "bitxor",       "add",          "sub"};
        return dest() + " = " + pick(rng_, ops) + " " + operand() + ", " + operand();
      }
      case 3: {
        static const std::vector<std::string> ops = {"mul", "div", "rem"};
        return dest() + " = " + pick(rng_, ops) + " " + operand() + ", " + operand();
      }
      case 4: {
        std::string amount = chance(rng_, 0.8) ? "const " + lit(uniform(rng_, 0, static_cast<int>(bit_width(kind_)) - 1), kind_)
                                               : operand();
        return dest() + " = " + (chance(rng_, 0.5) ? "shl " : "shr ") + operand() + ", " + amount;
      }
      case 5: return dest() + " = " + (is_signed(kind_) && chance(rng_, 0.5) ? "neg " : "not ") + operand();
      case 6: {
        static const std::vector<std::string> ops = {"lt", "le", "eq", "ne", "gt", "ge"};
        return "c = " + pick(rng_, ops) + " " + operand() + ", " + operand();
      }
      case 7: return "o = aggregate Opt<" + k_ + ">::Some(" + operand() + ")";
      case 8: return "o = aggregate Opt<" + k_ + ">::None()";
      case 9: {
        // little-endian bytes of a random value
        auto v = random_int(rng_, kind_);
        auto u = static_cast<unsigned __int128>(v);
        std::string hex;
        static const char* digits = "0123456789abcdef";
        for (unsigned i = 0; i < bit_width(kind_) / 8; ++i) {
          unsigned byte = static_cast<unsigned>((u >> (8 * i)) & 0xff);
          hex += digits[byte >> 4];
          hex += digits[byte & 15];
          hex += " ";
        }
        return dest() + " = use const raw(" + hex + "): " + k_;
      }
      case 10: return dest() + " = cast " + operand() + " as " + k_;
      default: return dest() + " = use " + operand();
    }
  }

  std::string block(int b) {
    std::string out = bb(static_cast<std::size_t>(b)) + ": { ";
    if (b == 0) {
      for (int i = 0; i < 4; ++i) out += "x" + std::to_string(i) + " = use " + (i < params_ ? "copy p" + std::to_string(i) : small_const()) + "; ";
      out += "c = lt copy p0, " + small_const() + "; ";
      out += "t = aggregate (copy p0, const false); ";
      out += (chance(rng_, 0.5) ? "o = aggregate Opt<" + k_ + ">::Some(copy p0); " : "o = aggregate Opt<" + k_ + ">::None(); ");
      out += "d = use const 0i64; ";
    }
    out += prefix_[static_cast<std::size_t>(b)];
    int n = uniform(rng_, 0, 3);
    for (int i = 0; i < n; ++i) out += statement() + "; ";
    return out + terminator(b) + " }";
  }

  std::string terminator(int b) {
    if (b == blocks_ - 1 && chance(rng_, 0.7)) return "ret = use copy " + var() + "; return";
    int r = uniform(rng_, 0, 99);
    if (r < 18) return "goto " + bb(target(b));
    if (r < 34) {
      std::string s = "switch copy c -> [0: " + bb(target(b)) + ", otherwise: " + bb(target(b)) + "]";
      return (chance(rng_, 0.6) ? "c = lt " + operand() + ", " + operand() + "; " : std::string()) + s;
    }
    if (r < 46) {
      std::string s = "switch copy " + var() + " -> [";
      std::vector<Int128> seen;
      int cases = uniform(rng_, 1, 3);
      for (int i = 0; i < cases; ++i) {
        Int128 v = chance(rng_, 0.7) ? Int128(uniform(rng_, 0, 3)) : random_int(rng_, kind_);
        if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
        seen.push_back(v);
        s += lit(v, kind_) + ": " + bb(target(b)) + ", ";
      }
      return s + "otherwise: " + bb(target(b)) + "]";
    }
    if (r < 56) {
      std::string s = "d = discriminant o; switch copy d -> [0: " + bb(target(b));
      if (chance(rng_, 0.7)) s += ", 1: " + bb(target(b));
      return s + ", otherwise: " + bb(target(b)) + "]";
    }
    if (r < 66 && b + 1 < blocks_) {
      // checked arithmetic guarded by an assert, result read at the target
      static const std::vector<std::string> ops = {"checked_add", "checked_sub", "checked_mul"};
      std::size_t next = static_cast<std::size_t>(uniform(rng_, b + 1, blocks_ - 1));
      if (prefix_[next].empty()) prefix_[next] = dest() + " = use copy t.f0; ";
      return "t = " + pick(rng_, ops) + " " + operand() + ", " + operand() + "; assert copy t.f1 == false -> " + bb(next);
    }
    if (r < 72) return "assert copy c == " + std::string(chance(rng_, 0.5) ? "true" : "false") + " -> " + bb(target(b));
    if (r < 80) return dest() + " = call " + o_.name + "_helper(" + operand() + ") -> " + bb(target(b));
    if (r < 83 && o_.prelude) return "z = call core::panicking::panic() -> " + bb(target(b));
    if (r < 94) return "ret = use copy " + var() + "; return";
    if (r < 98) return "abort panic";
    return "unreachable";
  }

  Rng& rng_;
  const CfgOptions& o_;
  ScalarKind kind_ = ScalarKind::U32;
  std::string k_;
  int params_ = 1;
  int blocks_ = 2;
  std::vector<std::string> prefix_;
};

// ---------------------------------------------------------------------------
// Types

bool generatable(const TranslatedCrate& crate, const Ty& ty, int depth) {
  if (depth > 8) return false;
  return std::visit(Overloaded{
                        [](const ScalarTy&) { return true; },
                        [](const BoolTy&) { return true; },
                        [&](const TupleTy& t) {
                          return std::all_of(t.elems.begin(), t.elems.end(),
                                             [&](const Ty& e) { return generatable(crate, e, depth + 1); });
                        },
                        [&](const ArrayTy& a) { return a.len <= 16 && generatable(crate, *a.elem, depth + 1); },
                        [&](const AdtTy& a) {
                          const TypeDecl* d = crate.type_decl(a.id);
                          if (d == nullptr || std::holds_alternative<OpaqueKind>(d->kind)) return false;
                          if (const auto* en = std::get_if<EnumKind>(&d->kind)) {
                            if (en->variants.empty()) return false;
                            for (std::size_t v = 0; v < en->variants.size(); ++v)
                              for (const auto& f : field_types(crate, ty, VariantId(v)))
                                if (!generatable(crate, f, depth + 1)) return false;
                            return true;
                          }
                          for (const auto& f : field_types(crate, ty, std::nullopt))
                            if (!generatable(crate, f, depth + 1)) return false;
                          return true;
                        },
                        [](const auto&) { return false; },
                    },
                    ty.kind);
}

std::optional<VariantId> random_variant(Rng& rng, const TranslatedCrate& crate, const Ty& ty) {
  const EnumKind* en = enum_kind(crate, ty);
  if (en == nullptr) return std::nullopt;
  return VariantId(uniform(rng, 0, static_cast<int>(en->variants.size()) - 1));
}

}  // namespace

std::string random_cfg_program(Rng& rng, const CfgOptions& options) { return CfgWriter(rng, options).run(); }

std::string random_reducible_program(Rng& rng, const CfgOptions& options) {
  for (;;) {
    std::string text = random_cfg_program(rng, options);
    TranslatedCrate crate = parse_crate(text);
    const FunDecl* f = crate.find_fun(options.name);
    if (oracle::reducible(std::get<ullbc::Body>(f->body))) return text;
  }
}

bool is_generatable(const TranslatedCrate& crate, const Ty& ty) { return generatable(crate, ty, 0); }

Value random_value(Rng& rng, const TranslatedCrate& crate, const Ty& ty) {
  if (const auto* s = ty.as<ScalarTy>()) return Value::integer(s->kind, random_int(rng, s->kind));
  if (ty.is<BoolTy>()) return Value::boolean(chance(rng, 0.5));
  if (const auto* a = ty.as<ArrayTy>()) {
    std::vector<Value> elems;
    for (Int128 i = 0; i < a->len; ++i) elems.push_back(random_value(rng, crate, *a->elem));
    return Value::aggregate(std::move(elems));
  }
  auto variant = random_variant(rng, crate, ty);
  std::vector<Value> fields;
  for (const auto& f : field_types(crate, ty, variant)) fields.push_back(random_value(rng, crate, f));
  return Value::aggregate(std::move(fields), variant);
}

ConstantValue random_constant(Rng& rng, const TranslatedCrate& crate, const Ty& ty) {
  if (const auto* s = ty.as<ScalarTy>()) return ConstantValue::scalar(s->kind, random_int(rng, s->kind));
  if (ty.is<BoolTy>()) return ConstantValue::boolean(chance(rng, 0.5));
  AdtConst value;
  if (const auto* a = ty.as<ArrayTy>()) {
    for (Int128 i = 0; i < a->len; ++i) value.fields.push_back(random_constant(rng, crate, *a->elem));
    return ConstantValue{ty, std::move(value)};
  }
  value.variant = random_variant(rng, crate, ty);
  for (const auto& f : field_types(crate, ty, value.variant)) value.fields.push_back(random_constant(rng, crate, f));
  return ConstantValue{ty, std::move(value)};
}

std::string random_type_decls(Rng& rng) {
  static const std::vector<std::string> leaves = {"u8", "i8", "u16", "i16", "u32", "i32", "u64", "i64", "bool"};
  std::ostringstream os;
  int n = uniform(rng, 2, 5);
  // each declaration only mentions earlier ones, so every type is finite
  for (int i = 0; i < n; ++i) {
    bool generic = chance(rng, 0.3);
    auto field_ty = [&]() -> std::string {
      int r = uniform(rng, 0, 9);
      if (generic && r < 2) return "T";
      if (i > 0 && r < 4) {
        int j = uniform(rng, 0, i - 1);
        return "D" + std::to_string(j);  // D-names are generic-free aliases declared below
      }
      if (r < 5) return "(" + pick(rng, leaves) + ", " + pick(rng, leaves) + ")";
      if (r < 6) return "[" + pick(rng, leaves) + "; " + std::to_string(uniform(rng, 0, 3)) + "]";
      return pick(rng, leaves);
    };
    std::string name = "D" + std::to_string(i);
    std::string gens = generic ? "<T>" : "";
    if (chance(rng, 0.5)) {
      os << "struct " << name << gens << " { ";
      int fields = uniform(rng, 0, 3);
      for (int f = 0; f < fields; ++f) os << (f ? ", " : "") << "f" << f << ": " << field_ty();
      os << " }\n";
    } else {
      os << "enum " << name << gens << " { ";
      int vars = uniform(rng, 1, 4);
      for (int v = 0; v < vars; ++v) {
        os << (v ? ", " : "") << "V" << v;
        int fields = uniform(rng, 0, 2);
        if (fields) {
          os << "(";
          for (int f = 0; f < fields; ++f) os << (f ? ", " : "") << field_ty();
          os << ")";
        }
      }
      os << " }\n";
    }
  }
  std::string text = os.str();
  // Refer to generic declarations with an argument.
  std::string fixed;
  std::istringstream in(text);
  std::map<std::string, bool> is_generic;
  for (std::string line; std::getline(in, line);) {
    std::string head = line.substr(0, line.find('{'));
    std::string name = head.substr(head.find(' ') + 1);
    name = name.substr(0, name.find_first_of("< "));
    // rewrite references to earlier generic declarations
    std::string body = line.substr(line.find('{'));
    for (const auto& [other, gen] : is_generic) {
      if (!gen) continue;
      std::size_t pos = 0;
      while ((pos = body.find(other, pos)) != std::string::npos) {
        std::size_t end = pos + other.size();
        bool whole = (end == body.size() || !std::isalnum(static_cast<unsigned char>(body[end]))) &&
                     (pos == 0 || !std::isalnum(static_cast<unsigned char>(body[pos - 1])));
        if (whole) {
          std::string arg = pick(rng, leaves);
          body.insert(end, "<" + arg + ">");
          pos = end + arg.size() + 2;
        } else {
          pos = end;
        }
      }
    }
    is_generic[name] = head.find("<T>") != std::string::npos;
    fixed += head + body + "\n";
  }
  return fixed;
}

Ty random_type(Rng& rng, const TranslatedCrate& crate, int depth) {
  int r = uniform(rng, 0, depth <= 1 ? 3 : 9);
  static const std::vector<ScalarKind> kinds = {ScalarKind::U8,  ScalarKind::I8,  ScalarKind::U16, ScalarKind::I16,
                                                ScalarKind::U32, ScalarKind::I32, ScalarKind::U64, ScalarKind::I64};
  if (r <= 2) return Ty::scalar(pick(rng, kinds));
  if (r == 3) return Ty::boolean();
  if (r <= 5) {
    std::vector<Ty> elems;
    int n = uniform(rng, 0, 3);
    for (int i = 0; i < n; ++i) elems.push_back(random_type(rng, crate, depth - 1));
    return Ty::tuple(std::move(elems));
  }
  if (r == 6) return Ty{ArrayTy{Box<Ty>(random_type(rng, crate, depth - 1)), static_cast<std::uint64_t>(uniform(rng, 0, 3))}};
  std::vector<const TypeDecl*> adts;
  for (const auto& d : crate.type_decls)
    if (!std::holds_alternative<OpaqueKind>(d.kind)) adts.push_back(&d);
  if (adts.empty()) return Ty::boolean();
  const TypeDecl* d = pick(rng, adts);
  GenericArgs args;
  for (std::size_t i = 0; i < d->generics.types.size(); ++i) args.types.push_back(random_type(rng, crate, depth - 1));
  return Ty::adt(d->id, std::move(args));
}

// ---------------------------------------------------------------------------
// Trait environments

std::string random_trait_env(Rng& rng) {
  std::ostringstream os;
  os << "type Box<T>;\ntype Pair<A, B>;\n";
  int traits = uniform(rng, 1, 6);
  std::vector<bool> extra(static_cast<std::size_t>(traits));
  auto bound = [&](int t, const std::string& arg_pool_pick) {
    std::string s = "Tr" + std::to_string(t);
    if (extra[static_cast<std::size_t>(t)]) s += "<" + arg_pool_pick + ">";
    return s;
  };
  static const std::vector<std::string> args = {"u8", "u32", "bool"};
  for (int t = 0; t < traits; ++t) {
    extra[static_cast<std::size_t>(t)] = chance(rng, 0.25);
    os << "trait Tr" << t << (extra[static_cast<std::size_t>(t)] ? "<X>" : "");
    if (t > 0 && chance(rng, 0.4)) {
      int parent = uniform(rng, 0, t - 1);
      os << ": " << bound(parent, pick(rng, args));
    }
    os << " { }\n";
  }
  int impls = uniform(rng, 0, 6);
  for (int i = 0; i < impls; ++i) {
    int t = uniform(rng, 0, traits - 1);
    // head: a scalar, or a type constructor over fresh parameters
    int shape = uniform(rng, 0, 4);
    std::string params, head;
    std::vector<std::string> vars;
    if (shape == 0) {
      head = pick(rng, std::vector<std::string>{"u8", "u32", "bool"});
    } else if (shape <= 2) {
      vars = {"T"};
      head = chance(rng, 0.3) ? "Box<Box<T>>" : "Box<T>";
    } else if (shape == 3) {
      vars = {"A", "B"};
      head = "Pair<A, B>";
    } else {
      vars = {"T"};
      head = chance(rng, 0.5) ? "Pair<T, u8>" : "Pair<T, T>";
    }
    std::string where;
    for (const auto& v : vars) {
      if (chance(rng, 0.6)) {
        int wt = uniform(rng, 0, traits - 1);
        where += (where.empty() ? " where " : ", ") + v + ": " + bound(wt, pick(rng, args));
      }
    }
    os << "impl I" << i;
    if (!vars.empty()) {
      os << "<";
      for (std::size_t k = 0; k < vars.size(); ++k) os << (k ? ", " : "") << vars[k];
      os << ">";
    }
    os << ": " << bound(t, pick(rng, args)) << " for " << head << where << " { }\n";
  }
  os << "fn f<P0, P1>()";
  int clauses = uniform(rng, 0, 2);
  for (int c = 0; c < clauses; ++c) {
    std::string self = pick(rng, std::vector<std::string>{"P0", "P1", "Box<P0>", "u8"});
    os << (c ? ", " : " where ") << self << ": " << bound(uniform(rng, 0, traits - 1), pick(rng, args));
  }
  os << " {\n  bb0: { return }\n}\n";
  return os.str();
}

TraitGoal random_goal(Rng& rng, const TranslatedCrate& crate) {
  auto box = TypeDeclId(0), pair = TypeDeclId(1);
  std::function<Ty(int)> ty = [&](int depth) -> Ty {
    int r = uniform(rng, 0, depth <= 0 ? 4 : 7);
    switch (r) {
      case 0: return Ty::scalar(ScalarKind::U8);
      case 1: return Ty::scalar(ScalarKind::U32);
      case 2: return Ty::boolean();
      case 3: return Ty::var(0);
      case 4: return Ty::var(1);
      case 5:
      case 6: {
        GenericArgs a;
        a.types.push_back(ty(depth - 1));
        return Ty::adt(box, a);
      }
      default: {
        GenericArgs a;
        a.types.push_back(ty(depth - 1));
        a.types.push_back(ty(depth - 1));
        return Ty::adt(pair, a);
      }
    }
  };
  TraitGoal goal;
  // a third of the goals instantiate an impl head and some restate a where-clause,
  // so that solvable and ambiguous goals are common
  int shape = uniform(rng, 0, 5);
  if (shape <= 1 && !crate.trait_impls.empty()) {
    const TraitImpl& impl = pick(rng, crate.trait_impls);
    GenericArgs inst;
    for (std::size_t i = 0; i < impl.generics.types.size(); ++i) inst.types.push_back(ty(1));
    goal.trait = impl.trait;
    goal.args.types = substitute(impl.trait_args, Substitution{&inst}).types;
    return goal;
  }
  const auto& clauses = crate.find_fun("f")->signature.generics.trait_clauses;
  if (shape == 2 && !clauses.empty()) {
    const TraitClause& c = pick(rng, clauses);
    goal.trait = c.trait;
    goal.args.types = c.args.types;
    return goal;
  }
  goal.trait = TraitDeclId(uniform(rng, 0, static_cast<int>(crate.trait_decls.size()) - 1));
  goal.args.types.push_back(ty(3));
  const TraitDecl* t = crate.trait_decl(goal.trait);
  static const std::vector<ScalarKind> args = {ScalarKind::U8, ScalarKind::U32};
  for (std::size_t i = 1; i < t->generics.types.size(); ++i)
    goal.args.types.push_back(chance(rng, 0.8) ? Ty::scalar(pick(rng, args)) : Ty::boolean());
  return goal;
}

std::string random_crate(Rng& rng) {
  std::string text = random_type_decls(rng) + random_trait_env(rng);
  CfgOptions o;
  o.name = "g";
  text += random_reducible_program(rng, o);
  o.name = "h";
  o.prelude = false;
  text += random_cfg_program(rng, o);
  return text;
}

}  // namespace gen
