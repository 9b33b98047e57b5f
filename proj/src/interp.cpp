#include "charon/interp.hpp"

#include <memory>

#include "charon/traits.hpp"

namespace charon {

Value Value::integer(ScalarKind k, Int128 v) {
  Value out;
  out.kind = Kind::Int;
  out.scalar = k;
  out.i = v;
  return out;
}

Value Value::boolean(bool v) {
  Value out;
  out.kind = Kind::Bool;
  out.b = v;
  return out;
}

Value Value::aggregate(std::vector<Value> fields, std::optional<VariantId> variant) {
  Value out;
  out.kind = Kind::Aggregate;
  out.fields = std::move(fields);
  out.variant = variant;
  return out;
}

Value value_of(const ConstantValue& c) {
  return std::visit(Overloaded{
                        [&](const ScalarConst& s) {
                          const auto* st = c.ty.as<ScalarTy>();
                          if (st == nullptr) throw Error("type-mismatch", "integer constant of non-integer type");
                          return Value::integer(st->kind, s.value);
                        },
                        [&](const BoolConst& b) { return Value::boolean(b.value); },
                        [&](const AdtConst& a) {
                          std::vector<Value> fields;
                          for (const auto& f : a.fields) fields.push_back(value_of(f));
                          return Value::aggregate(std::move(fields), a.variant);
                        },
                        [&](const RawConst&) -> Value {
                          throw Error("type-mismatch", "raw constant reached the interpreter");
                        },
                    },
                    c.kind);
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Uninit: return "<uninit>";
    case Value::Kind::Moved: return "<moved>";
    case Value::Kind::Int: return int128_to_string(v.i) + to_string(v.scalar);
    case Value::Kind::Bool: return v.b ? "true" : "false";
    case Value::Kind::Ptr: return "&l" + std::to_string(v.ptr.local);
    case Value::Kind::Aggregate: break;
  }
  std::string out = v.variant ? "#" + std::to_string(v.variant->index) : "";
  out += "(";
  for (std::size_t i = 0; i < v.fields.size(); ++i) out += (i ? ", " : "") + to_string(v.fields[i]);
  return out + ")";
}

std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Returned: return "returned " + to_string(o.value);
    case Outcome::Kind::Aborted: return o.abort == AbortKind::Panic ? "aborted panic" : "aborted ub";
    case Outcome::Kind::OutOfFuel: break;
  }
  return "out of fuel";
}

namespace {

struct Trap {
  AbortKind kind;
};
struct Exhausted {};

Int128 wrap(ScalarKind k, Int128 v) {
  unsigned bits = bit_width(k);
  auto u = static_cast<unsigned __int128>(v);
  if (bits < 128) u &= (static_cast<unsigned __int128>(1) << bits) - 1;
  if (is_signed(k) && bits < 128 && ((u >> (bits - 1)) & 1)) return static_cast<Int128>(u) - (static_cast<Int128>(1) << bits);
  return static_cast<Int128>(u);
}

bool in_range(ScalarKind k, Int128 v) { return v >= scalar_min(k) && v <= scalar_max(k); }

[[noreturn]] void mismatch(const std::string& what) { throw Error("type-mismatch", what); }

void check_init(const Value& v) {
  if (v.kind == Value::Kind::Uninit) throw Error("uninit-read", "read of an uninitialized value");
  if (v.kind == Value::Kind::Moved) throw Error("use-after-move", "read of a moved value");
  for (const auto& f : v.fields) check_init(f);
}

Value binop(BinOp op, const Value& a, const Value& b) {
  if (a.kind == Value::Kind::Bool && b.kind == Value::Kind::Bool) {
    switch (op) {
      case BinOp::BitAnd: return Value::boolean(a.b && b.b);
      case BinOp::BitOr: return Value::boolean(a.b || b.b);
      case BinOp::BitXor: return Value::boolean(a.b != b.b);
      case BinOp::Eq: return Value::boolean(a.b == b.b);
      case BinOp::Ne: return Value::boolean(a.b != b.b);
      case BinOp::Lt: return Value::boolean(a.b < b.b);
      case BinOp::Le: return Value::boolean(a.b <= b.b);
      case BinOp::Gt: return Value::boolean(a.b > b.b);
      case BinOp::Ge: return Value::boolean(a.b >= b.b);
      default: mismatch(std::string("operator ") + to_string(op) + " on booleans");
    }
  }
  if (a.kind != Value::Kind::Int || b.kind != Value::Kind::Int)
    mismatch(std::string("operator ") + to_string(op) + " on non-integer operands");
  ScalarKind k = a.scalar;
  bool shift = op == BinOp::Shl || op == BinOp::Shr;
  if (!shift && a.scalar != b.scalar) mismatch(std::string("operator ") + to_string(op) + " on mixed integer types");

  switch (op) {
    case BinOp::Eq: return Value::boolean(a.i == b.i);
    case BinOp::Ne: return Value::boolean(a.i != b.i);
    case BinOp::Lt: return Value::boolean(a.i < b.i);
    case BinOp::Le: return Value::boolean(a.i <= b.i);
    case BinOp::Gt: return Value::boolean(a.i > b.i);
    case BinOp::Ge: return Value::boolean(a.i >= b.i);
    case BinOp::BitAnd: return Value::integer(k, wrap(k, a.i & b.i));
    case BinOp::BitOr: return Value::integer(k, wrap(k, a.i | b.i));
    case BinOp::BitXor: return Value::integer(k, wrap(k, a.i ^ b.i));
    case BinOp::Div:
    case BinOp::Rem:
      if (b.i == 0) throw Trap{AbortKind::Panic};
      if (is_signed(k) && a.i == scalar_min(k) && b.i == -1) throw Trap{AbortKind::Panic};
      return Value::integer(k, op == BinOp::Div ? a.i / b.i : a.i % b.i);
    case BinOp::Shl:
    case BinOp::Shr: {
      if (b.i < 0 || b.i >= static_cast<Int128>(bit_width(k))) throw Trap{AbortKind::Panic};
      auto s = static_cast<unsigned>(b.i);
      if (op == BinOp::Shr) return Value::integer(k, a.i >> s);
      return Value::integer(k, wrap(k, static_cast<Int128>(static_cast<unsigned __int128>(a.i) << s)));
    }
    default: break;
  }

  // Add, Sub, Mul in their trapping, wrapping and checked forms.
  Int128 exact = 0;
  bool overflow = false;
  Int128 wrapped = 0;
  switch (op) {
    case BinOp::Add: case BinOp::WrappingAdd: case BinOp::CheckedAdd: exact = a.i + b.i; break;
    case BinOp::Sub: case BinOp::WrappingSub: case BinOp::CheckedSub: exact = a.i - b.i; break;
    default:
      if (__builtin_mul_overflow(a.i, b.i, &exact)) overflow = true;
      break;
  }
  if (overflow) {
    wrapped = wrap(k, static_cast<Int128>(static_cast<unsigned __int128>(a.i) * static_cast<unsigned __int128>(b.i)));
  } else {
    overflow = !in_range(k, exact);
    wrapped = wrap(k, exact);
  }
  switch (op) {
    case BinOp::Add: case BinOp::Sub: case BinOp::Mul:
      if (overflow) throw Trap{AbortKind::Panic};
      return Value::integer(k, exact);
    case BinOp::CheckedAdd: case BinOp::CheckedSub: case BinOp::CheckedMul:
      return Value::aggregate({Value::integer(k, wrapped), Value::boolean(overflow)});
    default:
      return Value::integer(k, wrapped);
  }
}

Value unop(const UnOp& op, const Value& v) {
  switch (op.kind) {
    case UnOpKind::Not:
      if (v.kind == Value::Kind::Bool) return Value::boolean(!v.b);
      if (v.kind == Value::Kind::Int) return Value::integer(v.scalar, wrap(v.scalar, ~v.i));
      break;
    case UnOpKind::Neg:
      if (v.kind == Value::Kind::Int && is_signed(v.scalar)) {
        if (v.i == scalar_min(v.scalar)) throw Trap{AbortKind::Panic};
        return Value::integer(v.scalar, -v.i);
      }
      break;
    case UnOpKind::Cast:
      if (v.kind == Value::Kind::Int) return Value::integer(op.target, wrap(op.target, v.i));
      if (v.kind == Value::Kind::Bool) return Value::integer(op.target, v.b ? 1 : 0);
      break;
  }
  mismatch("unary operator on an operand of the wrong type");
}

GenericArgs concat(const GenericArgs& a, const GenericArgs& b) {
  GenericArgs out = a;
  out.regions.insert(out.regions.end(), b.regions.begin(), b.regions.end());
  out.types.insert(out.types.end(), b.types.begin(), b.types.end());
  out.const_generics.insert(out.const_generics.end(), b.const_generics.begin(), b.const_generics.end());
  out.trait_refs.insert(out.trait_refs.end(), b.trait_refs.begin(), b.trait_refs.end());
  return out;
}

struct Frame {
  std::uint64_t uid = 0;
  const std::vector<Local>* locals = nullptr;
  std::vector<Value> values;
  std::optional<GenericArgs> generics;  // nullopt: entry frame, generics left symbolic
};

enum class Flow : std::uint8_t { Next, Return, Break, Continue };
struct Control {
  Flow flow = Flow::Next;
  std::uint32_t depth = 0;
};

class Machine {
 public:
  Machine(const TranslatedCrate& crate, const InterpConfig& config) : crate_(crate), config_(config) {}

  template <class F>
  Outcome run(F&& f) {
    Outcome out;
    try {
      out.value = f();
      out.kind = Outcome::Kind::Returned;
    } catch (const Trap& t) {
      out.kind = Outcome::Kind::Aborted;
      out.abort = t.kind;
    } catch (const Exhausted&) {
      out.kind = Outcome::Kind::OutOfFuel;
    }
    out.steps = steps_;
    return out;
  }

  template <class Body>
  Value enter(const Body& body, const std::vector<Value>& args, std::optional<GenericArgs> generics) {
    if (frames_.size() >= config_.max_call_depth) throw Exhausted{};
    if (args.size() != body.arg_count)
      mismatch("expected " + std::to_string(body.arg_count) + " arguments, got " + std::to_string(args.size()));
    auto frame = std::make_unique<Frame>();
    frame->uid = next_uid_++;
    frame->locals = &body.locals;
    frame->values.resize(body.locals.size());
    for (std::size_t i = 0; i < args.size(); ++i) frame->values[i + 1] = args[i];
    frame->generics = std::move(generics);
    frames_.push_back(std::move(frame));
    struct Pop {
      std::vector<std::unique_ptr<Frame>>& frames;
      ~Pop() { frames.pop_back(); }
    } pop{frames_};
    execute(body);
    Value ret = top().values.at(0);
    if (ret.kind == Value::Kind::Uninit && body.locals.at(0).ty == Ty::unit()) return Value::aggregate({});
    check_init(ret);
    return ret;
  }

 private:
  // ---- bookkeeping

  void tick() {
    if (steps_ >= config_.fuel) throw Exhausted{};
    ++steps_;
  }

  void jump() {
    if (++jumps_ > config_.fuel * config_.jumps_per_step) throw Exhausted{};
  }

  Frame& top() { return *frames_.back(); }

  Frame& frame_of(std::uint64_t uid) {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
      if ((*it)->uid == uid) return **it;
    mismatch("dereference of a pointer into a finished call");
  }

  // ---- places

  Pointer locate(const Place& place) {
    Pointer loc{top().uid, place.local.index, {}};
    if (place.local.index >= top().values.size()) mismatch("unknown local");
    for (const auto& proj : place.projection) {
      std::visit(Overloaded{
                     [&](const FieldProj& f) { loc.path.push_back({PathStep::Kind::Field, f.field}); },
                     [&](const DowncastProj& d) { loc.path.push_back({PathStep::Kind::Downcast, d.variant.index}); },
                     [&](const IndexProj& i) {
                       Value idx = read(*i.index);
                       if (idx.kind != Value::Kind::Int) mismatch("non-integer index");
                       if (idx.i < 0 || idx.i > 0xffffffff) throw Trap{AbortKind::Panic};
                       loc.path.push_back({PathStep::Kind::Index, static_cast<std::uint32_t>(idx.i)});
                     },
                     [&](const DerefProj&) {
                       const Value& p = at(loc, false);
                       if (p.kind == Value::Kind::Moved) throw Error("use-after-move", "dereference of a moved pointer");
                       if (p.kind == Value::Kind::Uninit) throw Error("uninit-read", "dereference of an uninitialized pointer");
                       if (p.kind != Value::Kind::Ptr) mismatch("dereference of a non-pointer");
                       loc = p.ptr;
                     },
                 },
                 proj);
    }
    return loc;
  }

  // Storage at `loc`. Writes materialize the aggregates they pass through.
  Value& at(const Pointer& loc, bool write) {
    Frame& f = frame_of(loc.frame);
    Value* v = &f.values.at(loc.local);
    for (const auto& step : loc.path) {
      bool fresh = v->kind == Value::Kind::Uninit || v->kind == Value::Kind::Moved;
      if (fresh && write) {
        *v = Value::aggregate({});
      } else if (v->kind != Value::Kind::Aggregate) {
        check_init(*v);
        mismatch("projection from a non-aggregate value");
      }
      switch (step.kind) {
        case PathStep::Kind::Downcast:
          if (!v->variant || v->variant->index != step.n) {
            if (!write) mismatch("downcast to an inactive variant");
            v->variant = VariantId(step.n);
            v->fields.clear();
          }
          break;
        case PathStep::Kind::Index:
          if (step.n >= v->fields.size()) throw Trap{AbortKind::Panic};
          v = &v->fields[step.n];
          break;
        case PathStep::Kind::Field:
          if (step.n >= v->fields.size()) {
            if (!write) throw Error("uninit-read", "read of an unassigned field");
            v->fields.resize(step.n + 1);
          }
          v = &v->fields[step.n];
          break;
      }
    }
    return *v;
  }

  Value read(const Operand& op) {
    return std::visit(Overloaded{
                          [&](const CopyOp& c) {
                            Value v = at(locate(c.place), false);
                            check_init(v);
                            return v;
                          },
                          [&](const MoveOp& m) {
                            Pointer loc = locate(m.place);
                            Value& slot = at(loc, false);
                            Value v = slot;
                            check_init(v);
                            slot = Value{};
                            slot.kind = Value::Kind::Moved;
                            return v;
                          },
                          [&](const ConstOp& c) { return value_of(c.value); },
                      },
                      op.kind);
  }

  void write(const Place& place, Value v) {
    Pointer loc = locate(place);
    at(loc, true) = std::move(v);
  }

  Ty type_of(const Place& place) { return place_type(crate_, *top().locals, place); }

  // ---- statements shared by both forms

  Value rvalue(const Rvalue& rv, const Place& dest) {
    return std::visit(
        Overloaded{
            [&](const UseRv& u) { return read(u.op); },
            [&](const BinaryRv& b) {
              Value lhs = read(b.lhs);
              Value rhs = read(b.rhs);
              return binop(b.op, lhs, rhs);
            },
            [&](const UnaryRv& u) { return unop(u.op, read(u.arg)); },
            [&](const DiscriminantRv& d) {
              const Value& v = at(locate(d.place), false);
              check_init(v);
              if (v.kind != Value::Kind::Aggregate || !v.variant) mismatch("discriminant of a non-enum value");
              const EnumKind* e = enum_kind(crate_, type_of(d.place));
              if (e == nullptr || v.variant->index >= e->variants.size()) mismatch("discriminant of a non-enum place");
              const auto* st = type_of(dest).as<ScalarTy>();
              if (st == nullptr) mismatch("discriminant stored into a non-integer place");
              return Value::integer(st->kind, wrap(st->kind, e->variants[v.variant->index].discriminant));
            },
            [&](const AggregateRv& a) {
              std::vector<Value> fields;
              for (const auto& op : a.ops) fields.push_back(read(op));
              std::optional<VariantId> variant;
              if (const auto* adt = std::get_if<AdtAggregate>(&a.kind)) variant = adt->variant;
              return Value::aggregate(std::move(fields), variant);
            },
            [&](const RefRv& r) {
              Value v;
              v.kind = Value::Kind::Ptr;
              v.ptr = locate(r.place);
              return v;
            },
        },
        rv.kind);
  }

  void assign(const Assign& a) {
    Value v = rvalue(a.value, a.dest);
    write(a.dest, std::move(v));
  }

  void drop(const Drop& d) {
    Value& slot = at(locate(d.place), true);
    slot = Value{};
    slot.kind = Value::Kind::Moved;
  }

  Int128 switch_value(const Operand& op) {
    Value v = read(op);
    if (v.kind == Value::Kind::Int) return v.i;
    if (v.kind == Value::Kind::Bool) return v.b ? 1 : 0;
    mismatch("switch on a non-integer value");
  }

  bool condition(const Operand& op) {
    Value v = read(op);
    if (v.kind != Value::Kind::Bool) mismatch("condition is not a boolean");
    return v.b;
  }

  std::uint32_t active_variant(const Place& place) {
    const Value& v = at(locate(place), false);
    check_init(v);
    if (v.kind != Value::Kind::Aggregate || !v.variant) mismatch("match on a non-enum value");
    return v.variant->index;
  }

  // ---- calls

  GenericArgs instantiate(const GenericArgs& args) {
    const auto& g = top().generics;
    if (!g || args.empty()) return args;
    return substitute(args, Substitution{&*g, nullptr, 0, "caller generics"});
  }

  TraitRefKind instantiate(const TraitRefKind& ref) {
    const auto& g = top().generics;
    if (!g) return ref;
    return substitute(ref, Substitution{&*g, nullptr, 0, "caller generics"});
  }

  // Callee declaration and its full generic arguments.
  std::pair<const FunDecl*, GenericArgs> callee(const FnOperand& func) {
    const auto* fp = std::get_if<FnPtr>(&func);
    if (fp == nullptr) mismatch("calls through function pointers are not supported");
    try {
      GenericArgs generics = instantiate(fp->generics);
      if (const auto* f = std::get_if<FunRef>(&fp->func)) {
        const FunDecl* decl = crate_.fun_decl(f->id);
        if (decl == nullptr) mismatch("unknown function");
        return {decl, generics};
      }
      TraitRefKind instance;
      std::string method;
      if (const auto* m = std::get_if<TraitMethodRef>(&fp->func)) {
        instance = instantiate(m->trait_ref);
        method = m->method;
      } else {
        const auto& u = std::get<UnresolvedMethodRef>(fp->func);
        const TraitDecl* trait = crate_.trait_decl(u.trait);
        if (trait == nullptr) mismatch("unknown trait");
        auto [container, own] = split_method_generics(generics, trait->generics);
        container.trait_refs.clear();
        instance = resolve_trait_ref(crate_, GenericParams{}, TraitGoal{u.trait, container});
        generics = own;
        method = u.method;
      }
      ImplRef impl_ref = concretize_trait_ref(crate_, instance);
      const TraitImpl* impl = crate_.trait_impl(impl_ref.id);
      for (const auto& m : impl->methods)
        if (m.name == method) return {crate_.fun_decl(m.fun), concat(*impl_ref.args, generics)};
      throw Error("opaque-call", "impl " + impl->meta.name + " does not define " + method);
    } catch (const Error& e) {
      if (e.code() == "opaque-call" || e.code() == "type-mismatch") throw;
      throw Error("opaque-call", std::string("cannot dispatch call: ") + e.what());
    }
  }

  void call(const Call& c) {
    auto [decl, generics] = callee(c.func);
    std::vector<Value> args;
    for (const auto& a : c.args) args.push_back(read(a));
    if (config_.panic_functions.count(decl->meta.name)) throw Trap{AbortKind::Panic};
    Value result = std::visit(Overloaded{
                                  [&](const OpaqueBody&) -> Value {
                                    throw Error("opaque-call", "call to opaque function " + decl->meta.name);
                                  },
                                  [&](const auto& body) { return enter(body, args, generics); },
                              },
                              decl->body);
    write(c.dest, std::move(result));
  }

  // ---- CFG bodies

  void execute(const ullbc::Body& body) {
    std::size_t b = 0;
    for (;;) {
      if (b >= body.blocks.size()) mismatch("jump to an unknown block");
      const auto& bb = body.blocks[b];
      for (const auto& st : bb.statements) {
        tick();
        std::visit(Overloaded{
                       [&](const Assign& a) { assign(a); },
                       [&](const Drop& d) { drop(d); },
                       [&](const Nop&) {},
                   },
                   st.kind);
      }
      bool done = false;
      std::visit(Overloaded{
                     [&](const ullbc::Goto& g) {
                       jump();
                       b = g.target.index;
                     },
                     [&](const ullbc::SwitchInt& s) {
                       tick();
                       Int128 v = switch_value(s.discr);
                       b = s.otherwise.index;
                       for (const auto& [value, target] : s.cases)
                         if (value == v) {
                           b = target.index;
                           break;
                         }
                     },
                     [&](const ullbc::Match& m) {
                       tick();
                       std::uint32_t v = active_variant(m.scrutinee);
                       for (const auto& [variant, target] : m.cases)
                         if (variant.index == v) {
                           b = target.index;
                           return;
                         }
                       if (!m.otherwise) throw Trap{AbortKind::UndefinedBehavior};
                       b = m.otherwise->index;
                     },
                     [&](const ullbc::Assert& a) {
                       tick();
                       if (condition(a.cond) != a.expected) {
                         tick();
                         throw Trap{AbortKind::Panic};
                       }
                       b = a.target.index;
                     },
                     [&](const ullbc::CallTerm& c) {
                       tick();
                       call(c.call);
                       b = c.target.index;
                     },
                     [&](const ullbc::Return&) {
                       tick();
                       done = true;
                     },
                     [&](const ullbc::Abort& a) {
                       tick();
                       throw Trap{a.kind};
                     },
                     [&](const ullbc::Unreachable&) {
                       tick();
                       throw Trap{AbortKind::UndefinedBehavior};
                     },
                 },
                 bb.terminator.kind);
      if (done) return;
    }
  }

  // ---- structured bodies

  void execute(const llbc::Body& body) {
    Control c = block(body.body);
    if (c.flow != Flow::Return) mismatch("control reached the end of a structured body without returning");
  }

  Control block(const llbc::Block& blk) {
    for (const auto& st : blk.statements) {
      Control c = statement(st);
      if (c.flow != Flow::Next) return c;
    }
    return {};
  }

  Control statement(const llbc::Statement& st) {
    return std::visit(
        Overloaded{
            [&](const Assign& a) {
              tick();
              assign(a);
              return Control{};
            },
            [&](const Drop& d) {
              tick();
              drop(d);
              return Control{};
            },
            [&](const Nop&) {
              tick();
              return Control{};
            },
            [&](const llbc::CallStmt& c) {
              tick();
              call(c.call);
              return Control{};
            },
            [&](const llbc::AbortStmt& a) -> Control {
              tick();
              throw Trap{a.kind};
            },
            [&](const llbc::ReturnStmt&) {
              tick();
              return Control{Flow::Return, 0};
            },
            [&](const llbc::Break& b) {
              jump();
              return Control{Flow::Break, b.depth};
            },
            [&](const llbc::Continue& c) {
              jump();
              return Control{Flow::Continue, c.depth};
            },
            [&](const llbc::SwitchStmt& s) {
              tick();
              return block(choose(s.sw));
            },
            [&](const llbc::Loop& l) {
              for (;;) {
                Control c = block(l.body);
                if (c.flow == Flow::Next || (c.flow == Flow::Continue && c.depth == 0)) {
                  jump();
                  continue;
                }
                if (c.flow == Flow::Break) return c.depth == 0 ? Control{} : Control{Flow::Break, c.depth - 1};
                if (c.flow == Flow::Continue) return Control{Flow::Continue, c.depth - 1};
                return c;
              }
            },
        },
        st.kind);
  }

  const llbc::Block& choose(const llbc::Switch& sw) {
    return std::visit(Overloaded{
                          [&](const llbc::If& i) -> const llbc::Block& {
                            return condition(i.cond) ? i.then_block : i.else_block;
                          },
                          [&](const llbc::SwitchInt& s) -> const llbc::Block& {
                            Int128 v = switch_value(s.discr);
                            for (const auto& [value, arm] : s.arms)
                              if (value == v) return arm;
                            return s.otherwise;
                          },
                          [&](const llbc::Match& m) -> const llbc::Block& {
                            std::uint32_t v = active_variant(m.scrutinee);
                            for (const auto& [variant, arm] : m.arms)
                              if (variant.index == v) return arm;
                            if (!m.otherwise) throw Trap{AbortKind::UndefinedBehavior};
                            return *m.otherwise;
                          },
                      },
                      sw);
  }

  const TranslatedCrate& crate_;
  const InterpConfig& config_;
  std::vector<std::unique_ptr<Frame>> frames_;
  std::uint64_t next_uid_ = 1;
  std::uint64_t steps_ = 0;
  std::uint64_t jumps_ = 0;
};

}  // namespace

Outcome interp_ullbc(const TranslatedCrate& crate, const ullbc::Body& body, const std::vector<Value>& args,
                     const InterpConfig& config) {
  Machine m(crate, config);
  return m.run([&] { return m.enter(body, args, std::nullopt); });
}

Outcome interp_llbc(const TranslatedCrate& crate, const llbc::Body& body, const std::vector<Value>& args,
                    const InterpConfig& config) {
  Machine m(crate, config);
  return m.run([&] { return m.enter(body, args, std::nullopt); });
}

Outcome interp_fun(const TranslatedCrate& crate, FunDeclId fun, const std::vector<Value>& args,
                   const InterpConfig& config) {
  const FunDecl* decl = crate.fun_decl(fun);
  if (decl == nullptr) throw Error("type-mismatch", "unknown function");
  Machine m(crate, config);
  return m.run([&]() -> Value {
    if (config.panic_functions.count(decl->meta.name)) throw Trap{AbortKind::Panic};
    return std::visit(Overloaded{
                          [&](const OpaqueBody&) -> Value {
                            throw Error("opaque-call", "function " + decl->meta.name + " has no body");
                          },
                          [&](const auto& body) { return m.enter(body, args, std::nullopt); },
                      },
                      decl->body);
  });
}

}  // namespace charon
