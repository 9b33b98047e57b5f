#include "charon/taint.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include <json.hpp>

#include "charon/traits.hpp"

namespace charon {

// ---------------------------------------------------------------------------
// Trees

bool TaintTree::any() const {
  if (rest) return true;
  return std::any_of(children.begin(), children.end(), [](const auto& c) { return c.second.any(); });
}

TaintTree TaintTree::child(std::int64_t key) const {
  auto it = children.find(key);
  return it == children.end() ? leaf(rest) : it->second;
}

namespace {

void normalize(TaintTree& t) {
  for (auto it = t.children.begin(); it != t.children.end();) {
    normalize(it->second);
    if (it->second.children.empty() && it->second.rest == t.rest) it = t.children.erase(it);
    else ++it;
  }
}

}  // namespace

TaintTree join(const TaintTree& a, const TaintTree& b) {
  TaintTree out;
  out.rest = a.rest || b.rest;
  for (const auto& [k, _] : a.children) out.children[k] = join(a.child(k), b.child(k));
  for (const auto& [k, _] : b.children)
    if (!out.children.count(k)) out.children[k] = join(a.child(k), b.child(k));
  normalize(out);
  return out;
}

TaintTree truncate(const TaintTree& t, std::uint32_t depth) {
  if (depth == 0) return TaintTree::leaf(t.any());
  TaintTree out{t.rest, {}};
  for (const auto& [k, c] : t.children) out.children[k] = truncate(c, depth - 1);
  normalize(out);
  return out;
}

std::string to_string(const TaintTree& t) {
  if (t.children.empty()) return t.rest ? "secret" : "public";
  std::string out = "{";
  out += t.rest ? "secret" : "public";
  for (const auto& [k, c] : t.children)
    out += "; " + (k >= 0 ? "." + std::to_string(k) : "#" + std::to_string(-k - 1)) + ": " + to_string(c);
  return out + "}";
}

namespace {

using State = std::vector<TaintTree>;

State join(const State& a, const State& b) {
  State out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = charon::join(a[i], b[i]);
  return out;
}

void join_into(std::optional<State>& acc, const State& s) { acc = acc ? join(*acc, s) : s; }

std::string key_of(FunDeclId fun, const std::vector<TaintTree>& inputs) {
  std::string k = std::to_string(fun.index);
  for (const auto& t : inputs) k += "|" + to_string(t);
  return k;
}

struct Memo {
  FnSummary summary;
  std::set<std::tuple<Span, std::string, std::string>> seen;  // (span, kind, message)
  std::vector<Violation> violations;
};

// Locals each local may point into, flow-insensitively.
std::vector<std::set<std::uint32_t>> points_to(const llbc::Body& body) {
  std::vector<std::set<std::uint32_t>> pts(body.locals.size());
  bool changed = true;
  auto flow = [&](std::uint32_t dest, const std::set<std::uint32_t>& from) {
    for (auto r : from) changed |= pts[dest].insert(r).second;
  };
  auto from_place = [&](const Place& p, std::set<std::uint32_t>& acc) { acc.insert(pts[p.local.index].begin(), pts[p.local.index].end()); };
  auto from_operand = [&](const Operand& op, std::set<std::uint32_t>& acc) {
    if (const Place* p = op.place()) from_place(*p, acc);
  };
  while (changed) {
    changed = false;
    for_each_statement(body.body, [&](const llbc::Statement& st) {
      std::set<std::uint32_t> acc;
      std::uint32_t dest = 0;
      if (const auto* a = std::get_if<Assign>(&st.kind)) {
        dest = a->dest.local.index;
        std::visit(Overloaded{
                       [&](const UseRv& u) { from_operand(u.op, acc); },
                       [&](const AggregateRv& g) {
                         for (const auto& op : g.ops) from_operand(op, acc);
                       },
                       [&](const RefRv& r) {
                         acc.insert(r.place.local.index);
                         from_place(r.place, acc);
                       },
                       [](const auto&) {},
                   },
                   a->value.kind);
      } else if (const auto* c = std::get_if<llbc::CallStmt>(&st.kind)) {
        dest = c->call.dest.local.index;
        for (const auto& op : c->call.args) from_operand(op, acc);
      } else {
        return;
      }
      flow(dest, acc);
    });
  }
  return pts;
}

class Analyzer;

// One function body under one input context.
class BodyRun {
 public:
  BodyRun(Analyzer& an, const FunDecl& fun, const llbc::Body& body, Memo& memo)
      : an_(an), fun_(fun), body_(body), memo_(memo), pts_(points_to(body)) {}

  void run(const std::vector<TaintTree>& inputs);

 private:
  struct LoopCtx {
    std::optional<State> cont;
    std::optional<State> brk;
  };

  void report(const char* kind, const Span& span, const std::string& message);

  bool is_param(std::uint32_t local) const { return local >= 1 && local <= body_.arg_count; }

  TaintTree referents(std::uint32_t local, const State& s) const {
    TaintTree t;
    for (auto r : pts_[local]) t = charon::join(t, TaintTree::leaf(s[r].any()));
    return t;
  }

  void check_indices(const Place& place, const State& s, const Span& span) {
    for (const auto& proj : place.projection)
      if (const auto* i = std::get_if<IndexProj>(&proj))
        if (operand(*i->index, s, span).any()) report("index", span, "array index depends on a secret");
  }

  TaintTree read(const Place& place, const State& s, const Span& span) {
    check_indices(place, s, span);
    TaintTree t = s[place.local.index];
    for (const auto& proj : place.projection) {
      std::visit(Overloaded{
                     [&](const FieldProj& f) { t = t.child(f.field); },
                     [&](const DowncastProj& d) { t = t.child(-static_cast<std::int64_t>(d.variant.index) - 1); },
                     [&](const IndexProj& i) {
                       // which element is read reveals the index
                       t = TaintTree::leaf(t.any() || operand(*i.index, s, span).any());
                     },
                     [&](const DerefProj&) {
                       t = charon::join(TaintTree::leaf(t.any()), referents(place.local.index, s));
                     },
                 },
                 proj);
    }
    return t;
  }

  TaintTree operand(const Operand& op, const State& s, const Span& span) {
    if (const Place* p = op.place()) return read(*p, s, span);
    return TaintTree::leaf(false);
  }

  // Secret stored through a reference held in `local`.
  void write_through(std::uint32_t local, bool secret, State& s) {
    if (!secret) return;
    for (auto r : pts_[local]) s[r] = TaintTree::leaf(true);
    s[local] = charon::join(s[local], TaintTree::leaf(true));
    if (is_param(local)) memo_.summary.writes_through[local - 1] = true;
  }

  void write(const Place& place, const TaintTree& value, State& s, const Span& span) {
    check_indices(place, s, span);
    const auto& proj = place.projection;
    bool via_ref = std::any_of(proj.begin(), proj.end(), [](const ProjectionElem& e) { return std::holds_alternative<DerefProj>(e); });
    if (via_ref) {
      write_through(place.local.index, value.any(), s);
      return;
    }
    std::uint32_t depth = an_config().max_depth;
    std::vector<std::int64_t> path;
    bool weak = false;
    for (const auto& e : proj) {
      if (const auto* f = std::get_if<FieldProj>(&e)) path.push_back(f->field);
      else if (const auto* d = std::get_if<DowncastProj>(&e)) path.push_back(-static_cast<std::int64_t>(d->variant.index) - 1);
      else {
        weak = true;  // index: any element may be the one written
        break;
      }
    }
    if (path.size() > depth) {
      path.resize(depth);
      weak = true;
    }
    s[place.local.index] = store(s[place.local.index], path, 0, value, weak, depth);
  }

  TaintTree store(const TaintTree& node, const std::vector<std::int64_t>& path, std::size_t i, const TaintTree& value,
                  bool weak, std::uint32_t depth) {
    if (i == path.size()) {
      if (weak) return TaintTree::leaf(node.any() || value.any());
      return truncate(value, depth - static_cast<std::uint32_t>(i));
    }
    TaintTree out = node;
    out.children[path[i]] = store(node.child(path[i]), path, i + 1, value, weak, depth);
    TaintTree normalized = charon::join(out, TaintTree::leaf(false));
    return normalized;
  }

  TaintTree rvalue(const Rvalue& rv, const State& s, const Span& span);
  std::optional<State> block(const llbc::Block& b, State s);
  std::optional<State> statement(const llbc::Statement& st, State s);
  void call(const Call& c, State& s, const Span& span, bool declassify);

  const TaintConfig& an_config() const;

  Analyzer& an_;
  const FunDecl& fun_;
  const llbc::Body& body_;
  Memo& memo_;
  std::vector<std::set<std::uint32_t>> pts_;
  std::vector<LoopCtx> loops_;
  std::optional<TaintTree> ret_;
};

class Analyzer {
 public:
  Analyzer(const TranslatedCrate& crate, const TaintConfig& config) : crate_(crate), config_(config) {}

  TaintReport run() {
    bool changed = true;
    while (changed) {
      changed_ = false;
      done_.clear();
      for (const auto& fun : crate_.fun_decls) {
        const auto* body = std::get_if<llbc::Body>(&fun.body);
        if (body == nullptr) continue;
        std::vector<TaintTree> inputs;
        for (std::size_t i = 1; i <= body->arg_count && i < body->locals.size(); ++i) {
          const auto& attrs = body->locals[i].attributes;
          inputs.push_back(TaintTree::leaf(std::find(attrs.begin(), attrs.end(), "secret") != attrs.end()));
        }
        summary(fun.id, inputs);
      }
      changed = changed_;
    }

    TaintReport report;
    std::set<std::tuple<Span, std::string, std::string, std::string>> seen;
    for (const auto& key : done_) {
      const Memo& m = memo_.at(key);
      report.summaries.push_back(m.summary);
      for (const auto& v : m.violations)
        if (seen.emplace(v.span, v.kind, v.function, v.message).second) report.violations.push_back(v);
    }
    std::sort(report.violations.begin(), report.violations.end(), [](const Violation& a, const Violation& b) {
      return std::tie(a.span, a.kind, a.function, a.message) < std::tie(b.span, b.kind, b.function, b.message);
    });
    std::sort(report.summaries.begin(), report.summaries.end(), [](const FnSummary& a, const FnSummary& b) {
      if (a.fun != b.fun) return a.fun < b.fun;
      return key_of(a.fun, a.inputs) < key_of(b.fun, b.inputs);
    });
    return report;
  }

  // Summary of `fun` under `inputs`, analyzing it at most once per round.
  const FnSummary& summary(FunDeclId fun_id, const std::vector<TaintTree>& inputs) {
    std::string key = key_of(fun_id, inputs);
    auto [it, fresh] = memo_.try_emplace(key);
    Memo& memo = it->second;
    if (fresh) {
      memo.summary.fun = fun_id;
      memo.summary.inputs = inputs;
      memo.summary.writes_through.assign(inputs.size(), false);
    }
    if (done_.count(key) || active_.count(key)) return memo.summary;
    active_.insert(key);
    const FunDecl* fun = crate_.fun_decl(fun_id);
    FnSummary before = memo.summary;
    memo.seen.clear();
    memo.violations.clear();
    BodyRun(*this, *fun, std::get<llbc::Body>(fun->body), memo).run(inputs);
    memo.summary.violations = memo.violations.size();
    if (!(memo.summary.output == before.output && memo.summary.writes_through == before.writes_through)) changed_ = true;
    active_.erase(key);
    done_.insert(key);
    return memo.summary;
  }

  const TranslatedCrate& crate() const { return crate_; }
  const TaintConfig& config() const { return config_; }

 private:
  const TranslatedCrate& crate_;
  const TaintConfig& config_;
  std::map<std::string, Memo> memo_;
  std::set<std::string> active_;
  std::set<std::string> done_;
  bool changed_ = false;
};

const TaintConfig& BodyRun::an_config() const { return an_.config(); }

void BodyRun::report(const char* kind, const Span& span, const std::string& message) {
  if (memo_.seen.emplace(span, kind, message).second)
    memo_.violations.push_back(Violation{kind, span, fun_.meta.name, message});
}

void BodyRun::run(const std::vector<TaintTree>& inputs) {
  State s(body_.locals.size());
  for (std::size_t i = 0; i < inputs.size() && i + 1 < s.size(); ++i) s[i + 1] = inputs[i];
  block(body_.body, s);
  // Outputs only grow across rounds so that recursion converges.
  if (ret_) memo_.summary.output = charon::join(memo_.summary.output, *ret_);
}

TaintTree BodyRun::rvalue(const Rvalue& rv, const State& s, const Span& span) {
  return std::visit(
      Overloaded{
          [&](const UseRv& u) { return operand(u.op, s, span); },
          [&](const BinaryRv& b) {
            bool secret = operand(b.lhs, s, span).any() | operand(b.rhs, s, span).any();
            if (secret && an_config().variable_latency.count(b.op)) {
              const char* kind = b.op == BinOp::Div ? "div" : b.op == BinOp::Rem ? "rem" : to_string(b.op);
              report(kind, span, std::string("variable-time `") + to_string(b.op) + "` on a secret operand");
            }
            return TaintTree::leaf(secret);
          },
          [&](const UnaryRv& u) { return TaintTree::leaf(operand(u.arg, s, span).any()); },
          [&](const DiscriminantRv& d) { return TaintTree::leaf(read(d.place, s, span).rest); },
          [&](const AggregateRv& a) {
            TaintTree fields;
            for (std::size_t i = 0; i < a.ops.size(); ++i)
              fields.children[static_cast<std::int64_t>(i)] = operand(a.ops[i], s, span);
            fields = charon::join(fields, TaintTree::leaf(false));
            const auto* adt = std::get_if<AdtAggregate>(&a.kind);
            if (adt == nullptr || !adt->variant) return fields;
            TaintTree tagged;
            tagged.children[-static_cast<std::int64_t>(adt->variant->index) - 1] = fields;
            return charon::join(tagged, TaintTree::leaf(false));
          },
          [&](const RefRv& r) { return TaintTree::leaf(read(r.place, s, span).any()); },
      },
      rv.kind);
}

void BodyRun::call(const Call& c, State& s, const Span& span, bool declassify) {
  std::vector<TaintTree> args;
  std::vector<std::optional<std::uint32_t>> arg_locals;
  for (const auto& op : c.args) {
    TaintTree t = operand(op, s, span);
    const Place* p = op.place();
    if (p != nullptr && !pts_[p->local.index].empty()) t = TaintTree::leaf(t.any() || referents(p->local.index, s).any());
    args.push_back(truncate(t, an_config().max_depth));
    arg_locals.push_back(p ? std::optional<std::uint32_t>(p->local.index) : std::nullopt);
  }

  const FunDecl* callee = nullptr;
  bool unknown_instance = false;
  if (const auto* fp = std::get_if<FnPtr>(&c.func)) {
    if (const auto* f = std::get_if<FunRef>(&fp->func)) {
      callee = an_.crate().fun_decl(f->id);
    } else if (const auto* m = std::get_if<TraitMethodRef>(&fp->func)) {
      try {
        ImplRef impl_ref = concretize_trait_ref(an_.crate(), m->trait_ref);
        for (const auto& im : an_.crate().trait_impl(impl_ref.id)->methods)
          if (im.name == m->method) callee = an_.crate().fun_decl(im.fun);
      } catch (const Error&) {
        unknown_instance = true;
      }
    } else {
      unknown_instance = true;
    }
  } else {
    unknown_instance = true;
  }

  TaintTree result;
  std::vector<bool> through(args.size(), false);
  bool any_secret = std::any_of(args.begin(), args.end(), [](const TaintTree& t) { return t.any(); });
  if (callee != nullptr && std::holds_alternative<llbc::Body>(callee->body)) {
    FnSummary sum = an_.summary(callee->id, args);
    result = sum.output;
    for (std::size_t i = 0; i < through.size() && i < sum.writes_through.size(); ++i) through[i] = sum.writes_through[i];
  } else if (unknown_instance) {
    // Generic instance: assume the result depends on every argument.
    result = TaintTree::leaf(any_secret);
    through.assign(args.size(), any_secret);
  } else {
    if (an_config().opaque == OpaquePolicy::Error)
      throw Error("missing-body", "call to `" + (callee ? callee->meta.name : std::string("?")) + "` without a body", span);
    result = TaintTree::leaf(true);
    through.assign(args.size(), true);
  }
  for (std::size_t i = 0; i < args.size(); ++i)
    if (through[i] && arg_locals[i]) write_through(*arg_locals[i], true, s);
  write(c.dest, declassify ? TaintTree::leaf(false) : result, s, span);
}

std::optional<State> BodyRun::block(const llbc::Block& b, State s) {
  for (const auto& st : b.statements) {
    auto next = statement(st, std::move(s));
    if (!next) return std::nullopt;
    s = std::move(*next);
  }
  return s;
}

std::optional<State> BodyRun::statement(const llbc::Statement& st, State s) {
  bool declassify = std::find(st.attributes.begin(), st.attributes.end(), "declassify") != st.attributes.end();
  return std::visit(
      Overloaded{
          [&](const Assign& a) -> std::optional<State> {
            TaintTree v = rvalue(a.value, s, st.span);
            write(a.dest, declassify ? TaintTree::leaf(false) : v, s, st.span);
            return s;
          },
          [&](const llbc::CallStmt& c) -> std::optional<State> {
            call(c.call, s, st.span, declassify);
            return s;
          },
          [&](const llbc::AbortStmt&) -> std::optional<State> { return std::nullopt; },
          [&](const llbc::ReturnStmt&) -> std::optional<State> {
            ret_ = ret_ ? charon::join(*ret_, s[0]) : s[0];
            return std::nullopt;
          },
          [&](const Nop&) -> std::optional<State> { return s; },
          [&](const Drop& d) -> std::optional<State> {
            check_indices(d.place, s, st.span);
            return s;
          },
          [&](const llbc::Break& b) -> std::optional<State> {
            join_into(loops_.at(loops_.size() - 1 - b.depth).brk, s);
            return std::nullopt;
          },
          [&](const llbc::Continue& c) -> std::optional<State> {
            join_into(loops_.at(loops_.size() - 1 - c.depth).cont, s);
            return std::nullopt;
          },
          [&](const llbc::SwitchStmt& sw) -> std::optional<State> {
            std::vector<const llbc::Block*> arms;
            std::visit(Overloaded{
                           [&](const llbc::If& i) {
                             if (operand(i.cond, s, st.span).any()) report("branch", st.span, "branch on a secret condition");
                             arms = {&i.then_block, &i.else_block};
                           },
                           [&](const llbc::SwitchInt& si) {
                             if (operand(si.discr, s, st.span).any()) report("branch", st.span, "switch on a secret value");
                             for (const auto& [v, b] : si.arms) arms.push_back(&b);
                             arms.push_back(&si.otherwise);
                           },
                           [&](const llbc::Match& m) {
                             if (read(m.scrutinee, s, st.span).rest)
                               report("branch", st.span, "match on a value whose variant is secret");
                             for (const auto& [v, b] : m.arms) arms.push_back(&b);
                             if (m.otherwise) arms.push_back(&*m.otherwise);
                           },
                       },
                       sw.sw);
            std::optional<State> out;
            for (const auto* arm : arms)
              if (auto r = block(*arm, s)) join_into(out, *r);
            return out;
          },
          [&](const llbc::Loop& l) -> std::optional<State> {
            loops_.push_back(LoopCtx{});
            State head = s;
            for (;;) {
              loops_.back().cont.reset();
              if (auto r = block(l.body, head)) join_into(loops_.back().cont, *r);
              State next = loops_.back().cont ? join(head, *loops_.back().cont) : head;
              if (next == head) break;
              head = std::move(next);
            }
            std::optional<State> out = loops_.back().brk;
            loops_.pop_back();
            return out;
          },
      },
      st.kind);
}

std::string span_text(const TranslatedCrate& crate, const Span& span) {
  std::string file = span.file.index < crate.files.size() ? crate.files[span.file.index].name : "?";
  return file + ":" + std::to_string(span.beg_line) + ":" + std::to_string(span.beg_col);
}

std::string inputs_text(const std::vector<TaintTree>& inputs) {
  std::string out = "(";
  for (std::size_t i = 0; i < inputs.size(); ++i) out += (i ? ", " : "") + to_string(inputs[i]);
  return out + ")";
}

}  // namespace

TaintReport analyze_taint(const TranslatedCrate& crate, const TaintConfig& config) {
  return Analyzer(crate, config).run();
}

std::string report_text(const TranslatedCrate& crate, const TaintReport& report) {
  std::string out;
  for (const auto& v : report.violations)
    out += span_text(crate, v.span) + ": " + v.kind + " in `" + v.function + "`: " + v.message + "\n";
  out += std::to_string(report.violations.size()) + (report.violations.size() == 1 ? " violation\n" : " violations\n");
  for (const auto& s : report.summaries) {
    const FunDecl* f = crate.fun_decl(s.fun);
    out += "summary " + (f ? f->meta.name : "?") + inputs_text(s.inputs) + " -> " + to_string(s.output);
    for (std::size_t i = 0; i < s.writes_through.size(); ++i)
      if (s.writes_through[i]) out += ", writes secret through parameter " + std::to_string(i);
    out += "\n";
  }
  return out;
}

std::string report_json(const TranslatedCrate& crate, const TaintReport& report) {
  using json = nlohmann::ordered_json;
  json violations = json::array();
  for (const auto& v : report.violations) {
    std::string file = v.span.file.index < crate.files.size() ? crate.files[v.span.file.index].name : "";
    violations.push_back(json{{"kind", v.kind},
                              {"span",
                               json{{"file", file},
                                    {"beg_line", v.span.beg_line},
                                    {"beg_col", v.span.beg_col},
                                    {"end_line", v.span.end_line},
                                    {"end_col", v.span.end_col}}},
                              {"function", v.function},
                              {"message", v.message}});
  }
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    const FunDecl* f = crate.fun_decl(s.fun);
    json inputs = json::array();
    for (const auto& t : s.inputs) inputs.push_back(to_string(t));
    json through = json::array();
    for (bool b : s.writes_through) through.push_back(b);
    summaries.push_back(json{{"function", f ? f->meta.name : ""},
                             {"inputs", std::move(inputs)},
                             {"output", to_string(s.output)},
                             {"writes_through", std::move(through)},
                             {"violations", s.violations}});
  }
  json doc{{"violation_count", report.violations.size()},
           {"violations", std::move(violations)},
           {"summaries", std::move(summaries)}};
  return doc.dump(2) + "\n";
}

}  // namespace charon
