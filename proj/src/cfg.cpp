#include "charon/cfg.hpp"

#include <algorithm>
#include <map>

#include "charon/passes.hpp"

namespace charon {

namespace {

using Graph = std::vector<std::vector<std::size_t>>;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Cooper, Harvey and Kennedy's iterative dominator algorithm over reverse
// postorder. Returns kNone for nodes unreachable from `entry`.
std::vector<std::size_t> immediate_dominators(const Graph& succ, std::size_t entry) {
  std::size_t n = succ.size();
  std::vector<std::size_t> post;
  std::vector<bool> seen(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{entry, 0}};
  seen[entry] = true;
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    if (i < succ[v].size()) {
      std::size_t w = succ[v][i++];
      if (!seen[w]) {
        seen[w] = true;
        stack.emplace_back(w, 0);
      }
    } else {
      post.push_back(v);
      stack.pop_back();
    }
  }
  std::vector<std::size_t> rpo_num(n, kNone);
  for (std::size_t k = 0; k < post.size(); ++k) rpo_num[post[k]] = post.size() - 1 - k;
  Graph preds(n);
  for (std::size_t u = 0; u < n; ++u)
    if (seen[u])
      for (auto v : succ[u]) preds[v].push_back(u);

  std::vector<std::size_t> idom(n, kNone);
  idom[entry] = entry;
  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (rpo_num[a] > rpo_num[b]) a = idom[a];
      while (rpo_num[b] > rpo_num[a]) b = idom[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = post.rbegin(); it != post.rend(); ++it) {
      std::size_t b = *it;
      if (b == entry) continue;
      std::size_t nd = kNone;
      for (auto p : preds[b]) {
        if (idom[p] == kNone) continue;
        nd = nd == kNone ? p : intersect(p, nd);
      }
      if (nd != idom[b]) {
        idom[b] = nd;
        changed = true;
      }
    }
  }
  return idom;
}

Graph successor_graph(const ullbc::Body& body) {
  Graph g(body.blocks.size());
  for (std::size_t b = 0; b < body.blocks.size(); ++b)
    for (auto s : ullbc::successors(body.blocks[b].terminator))
      if (s.index < body.blocks.size()) g[b].push_back(s.index);
  return g;
}

struct Context {
  std::size_t header;
  std::size_t exit;  // kNone when the loop has no exit
};

class Restructurer {
 public:
  Restructurer(const TranslatedCrate& crate, ullbc::Body body) : crate_(crate), body_(std::move(body)) {}

  llbc::Body run() {
    n_ = body_.blocks.size();
    succ_ = successor_graph(body_);
    idom_ = compute_dominators(body_);
    loops_ = find_loops(body_, idom_);
    for (std::size_t i = 0; i < loops_.size(); ++i) loop_of_header_[loops_[i].header.index] = i;
    compute_post_dominators();
    for (std::size_t i = 0; i < loops_.size(); ++i) exit_of_[loops_[i].header.index] = choose_exit(loops_[i]);
    emitted_.assign(n_, 0);

    llbc::Body out;
    out.span = body_.span;
    out.locals = body_.locals;
    out.arg_count = body_.arg_count;
    inline_block(0, kNone, out.body);
    out.body.span = body_.span;
    return out;
  }

 private:
  bool is_back_edge(std::size_t u, std::size_t v) const { return dominates(idom_, BlockId(v), BlockId(u)); }

  void compute_post_dominators() {
    vexit_ = n_;
    Graph rev(n_ + 1);
    for (std::size_t u = 0; u < n_; ++u) {
      bool has_forward = false;
      for (auto v : succ_[u]) {
        if (is_back_edge(u, v)) continue;
        rev[v].push_back(u);
        has_forward = true;
      }
      if (!has_forward) rev[vexit_].push_back(u);
    }
    ipdom_ = immediate_dominators(rev, vexit_);
    pdom_depth_.assign(n_ + 1, 0);
    for (std::size_t v = 0; v < n_; ++v) {
      std::size_t d = 0;
      for (std::size_t w = v; w != vexit_ && w != kNone; w = ipdom_[w]) ++d;
      pdom_depth_[v] = d;
    }
  }

  // `a` post-dominates `b` in the acyclic graph (reflexive).
  bool post_dominates(std::size_t a, std::size_t b) const {
    for (std::size_t w = b;; w = ipdom_[w]) {
      if (w == a) return true;
      if (w == vexit_ || w == kNone) return false;
    }
  }

  std::size_t common_post_dominator(std::size_t a, std::size_t b) const {
    while (a != b) {
      if (pdom_depth_[a] < pdom_depth_[b]) {
        b = ipdom_[b];
      } else {
        a = ipdom_[a];
      }
    }
    return a;
  }

  std::size_t choose_exit(const NaturalLoop& loop) {
    std::map<std::size_t, std::size_t> edges;  // exit target -> number of exit edges
    for (auto b : loop.blocks)
      for (auto v : succ_[b.index])
        if (!loop.blocks.count(BlockId(v))) ++edges[v];
    if (edges.empty()) return kNone;
    std::size_t join = edges.begin()->first;
    for (const auto& [v, count] : edges) join = common_post_dominator(join, v);
    if (join != vexit_) return join;
    multi_exit_ = true;
    std::size_t best = kNone;
    for (const auto& [v, count] : edges) {
      if (best == kNone) {
        best = v;
        continue;
      }
      auto key = [&](std::size_t x) {
        return std::make_tuple(edges[x], pdom_depth_[x], ~x);
      };
      if (key(v) > key(best)) best = v;
    }
    return best;
  }

  [[noreturn]] void over_cap(std::size_t block) const {
    std::string msg = "block bb" + std::to_string(block) + " would be emitted more than " +
                      std::to_string(kDuplicationCap) + " times";
    if (multi_exit_) throw Error("multi-exit-unsupported", "loop with several exit targets: " + msg, body_.span);
    throw Error("duplication-cap-exceeded", msg, body_.span);
  }

  void emit_goto(std::size_t target, std::size_t stop, llbc::Block& out) {
    if (target == stop) return;
    for (std::size_t i = 0; i < ctx_.size(); ++i) {
      const auto& c = ctx_[ctx_.size() - 1 - i];
      if (c.header == target) {
        push(out, Span{}, {}, llbc::Continue{static_cast<std::uint32_t>(i)});
        return;
      }
      if (c.exit == target) {
        push(out, Span{}, {}, llbc::Break{static_cast<std::uint32_t>(i)});
        return;
      }
    }
    inline_block(target, stop, out);
  }

  void inline_block(std::size_t b, std::size_t stop, llbc::Block& out) {
    if (++emitted_[b] > kDuplicationCap) over_cap(b);
    auto it = loop_of_header_.find(b);
    bool entered = std::any_of(ctx_.begin(), ctx_.end(), [&](const Context& c) { return c.header == b; });
    if (it != loop_of_header_.end() && !entered) {
      std::size_t exit = exit_of_[b];
      ctx_.push_back(Context{b, exit});
      llbc::Loop loop;
      block_contents(b, kNone, loop.body);
      ctx_.pop_back();
      loop.body.span = span_of(loop.body);
      push(out, loop.body.span, {}, std::move(loop));
      if (exit != kNone) emit_goto(exit, stop, out);
      return;
    }
    block_contents(b, stop, out);
  }

  static Span span_of(const llbc::Block& block) {
    return block.statements.empty() ? Span{} : block.statements.front().span;
  }

  template <class Kind>
  void push(llbc::Block& out, const Span& span, std::vector<std::string> comments, Kind kind,
            std::vector<std::string> attributes = {}) {
    llbc::Statement st;
    st.span = span;
    st.comments = std::move(comments);
    st.attributes = std::move(attributes);
    st.kind = std::move(kind);
    if (out.statements.empty()) out.span = span;
    out.statements.push_back(std::move(st));
  }

  // Join point of a branch in `b`, if usable within the region ending at `stop`.
  std::size_t join_of(std::size_t b, std::size_t stop) const {
    std::size_t j = ipdom_[b];
    if (j == kNone || j == vexit_) return kNone;
    if (stop != kNone && j != stop && !post_dominates(stop, j)) return kNone;
    return j;
  }

  bool is_bool(const Operand& op) const {
    try {
      return operand_type(crate_, body_.locals, op).is<BoolTy>();
    } catch (const Error&) {
      return false;
    }
  }

  void block_contents(std::size_t b, std::size_t stop, llbc::Block& out) {
    const auto& bb = body_.blocks[b];
    for (const auto& st : bb.statements) {
      std::visit([&](const auto& k) { push(out, st.span, st.comments, k, st.attributes); }, st.kind);
    }
    const auto& term = bb.terminator;
    std::visit(
        Overloaded{
            [&](const ullbc::Goto& g) { emit_goto(g.target.index, stop, out); },
            [&](const ullbc::Return&) { push(out, term.span, term.comments, llbc::ReturnStmt{}); },
            [&](const ullbc::Abort& a) { push(out, term.span, term.comments, llbc::AbortStmt{a.kind}); },
            [&](const ullbc::Unreachable&) {
              push(out, term.span, term.comments, llbc::AbortStmt{AbortKind::UndefinedBehavior});
            },
            [&](const ullbc::CallTerm& c) {
              push(out, term.span, term.comments, llbc::CallStmt{c.call});
              emit_goto(c.target.index, stop, out);
            },
            [&](const ullbc::Assert& a) {
              llbc::Block ok, fail;
              push(fail, term.span, {}, llbc::AbortStmt{AbortKind::Panic});
              llbc::If branch{a.cond, a.expected ? ok : fail, a.expected ? fail : ok};
              push(out, term.span, term.comments, llbc::SwitchStmt{std::move(branch)});
              emit_goto(a.target.index, stop, out);
            },
            [&](const ullbc::SwitchInt& s) {
              std::size_t j = join_of(b, stop);
              std::size_t arm_stop = j != kNone ? j : stop;
              auto arm = [&](BlockId target) {
                llbc::Block blk;
                emit_goto(target.index, arm_stop, blk);
                return blk;
              };
              if (s.cases.size() == 1 && (s.cases[0].first == 0 || s.cases[0].first == 1) && is_bool(s.discr)) {
                llbc::Block on_case = arm(s.cases[0].second);
                llbc::Block on_other = arm(s.otherwise);
                bool case_is_true = s.cases[0].first == 1;
                llbc::If branch{s.discr, case_is_true ? on_case : on_other, case_is_true ? on_other : on_case};
                push(out, term.span, term.comments, llbc::SwitchStmt{std::move(branch)});
              } else {
                llbc::SwitchInt sw;
                sw.discr = s.discr;
                for (const auto& [v, target] : s.cases) sw.arms.emplace_back(v, arm(target));
                sw.otherwise = arm(s.otherwise);
                push(out, term.span, term.comments, llbc::SwitchStmt{std::move(sw)});
              }
              if (j != kNone) emit_goto(j, stop, out);
            },
            [&](const ullbc::Match& m) {
              std::size_t j = join_of(b, stop);
              std::size_t arm_stop = j != kNone ? j : stop;
              auto arm = [&](BlockId target) {
                llbc::Block blk;
                emit_goto(target.index, arm_stop, blk);
                return blk;
              };
              llbc::Match lm;
              lm.scrutinee = m.scrutinee;
              for (const auto& [v, target] : m.cases) lm.arms.emplace_back(v, arm(target));
              if (m.otherwise) lm.otherwise = arm(*m.otherwise);
              push(out, term.span, term.comments, llbc::SwitchStmt{std::move(lm)});
              if (j != kNone) emit_goto(j, stop, out);
            },
        },
        term.kind);
  }

  const TranslatedCrate& crate_;
  ullbc::Body body_;
  std::size_t n_ = 0;
  std::size_t vexit_ = 0;
  Graph succ_;
  DominatorTree idom_;
  std::vector<NaturalLoop> loops_;
  std::map<std::size_t, std::size_t> loop_of_header_;
  std::map<std::size_t, std::size_t> exit_of_;
  std::vector<std::size_t> ipdom_;
  std::vector<std::size_t> pdom_depth_;
  std::vector<int> emitted_;
  std::vector<Context> ctx_;
  bool multi_exit_ = false;
};

// Walks a structured block; returns whether every path through it ends in a
// terminal statement.
struct LlbcChecker {
  Diagnostics diags;
  std::vector<bool> broken;  // per enclosing loop, innermost last: some break exits it

  bool block(const llbc::Block& b, std::uint32_t loop_depth) {
    bool terminated = false;
    for (const auto& st : b.statements) {
      bool t = statement(st, loop_depth);
      terminated = terminated || t;
    }
    return terminated;
  }

  bool statement(const llbc::Statement& st, std::uint32_t loop_depth) {
    return std::visit(
        Overloaded{
            [&](const llbc::ReturnStmt&) { return true; },
            [&](const llbc::AbortStmt&) { return true; },
            [&](const llbc::Break& br) {
              if (br.depth >= loop_depth)
                diags.push_back({"bad-break-depth", st.span, "break " + std::to_string(br.depth) + " outside enough loops", ""});
              else
                broken[broken.size() - 1 - br.depth] = true;
              return true;
            },
            [&](const llbc::Continue& c) {
              if (c.depth >= loop_depth)
                diags.push_back({"bad-break-depth", st.span, "continue " + std::to_string(c.depth) + " outside enough loops", ""});
              return true;
            },
            [&](const llbc::Loop& l) {
              broken.push_back(false);
              if (!block(l.body, loop_depth + 1))
                diags.push_back({"unterminated-path", st.span, "loop body can fall off its end", ""});
              bool exits = broken.back();
              broken.pop_back();
              // a loop nothing breaks out of never falls through
              return !exits;
            },
            [&](const llbc::SwitchStmt& s) {
              return std::visit(Overloaded{
                                    [&](const llbc::If& i) {
                                      bool a = block(i.then_block, loop_depth);
                                      bool b = block(i.else_block, loop_depth);
                                      return a && b;
                                    },
                                    [&](const llbc::SwitchInt& sw) {
                                      bool all = block(sw.otherwise, loop_depth);
                                      for (const auto& arm : sw.arms) all = block(arm.second, loop_depth) && all;
                                      return all;
                                    },
                                    [&](const llbc::Match& m) {
                                      bool all = true;
                                      for (const auto& arm : m.arms) all = block(arm.second, loop_depth) && all;
                                      if (m.otherwise) all = block(*m.otherwise, loop_depth) && all;
                                      return all;
                                    },
                                },
                                s.sw);
            },
            [](const auto&) { return false; },
        },
        st.kind);
  }
};

}  // namespace

DominatorTree compute_dominators(const ullbc::Body& body) {
  DominatorTree out(body.blocks.size());
  if (body.blocks.empty()) return out;
  auto idom = immediate_dominators(successor_graph(body), 0);
  for (std::size_t b = 0; b < idom.size(); ++b)
    if (idom[b] != kNone) out[b] = BlockId(idom[b]);
  return out;
}

bool dominates(const DominatorTree& idom, BlockId a, BlockId b) {
  if (b.index >= idom.size() || !idom[b.index]) return false;
  for (BlockId w = b;;) {
    if (w == a) return true;
    BlockId up = *idom[w.index];
    if (up == w) return false;
    w = up;
  }
}

std::vector<NaturalLoop> find_loops(const ullbc::Body& body, const DominatorTree& idom) {
  std::size_t n = body.blocks.size();
  Graph succ = successor_graph(body);
  Graph preds(n);
  for (std::size_t u = 0; u < n; ++u)
    for (auto v : succ[u]) preds[v].push_back(u);

  // Retreating edges found by DFS must all be back edges (target dominates source).
  std::map<std::size_t, std::vector<std::size_t>> back_edges;
  if (n > 0) {
    std::vector<int> color(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    color[0] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < succ[v].size()) {
        std::size_t w = succ[v][i++];
        if (color[w] == 1) {
          if (!dominates(idom, BlockId(w), BlockId(v)))
            throw Error("irreducible-cfg",
                        "edge bb" + std::to_string(v) + " -> bb" + std::to_string(w) +
                            " enters a cycle other than through its header",
                        body.span);
          back_edges[w].push_back(v);
        } else if (color[w] == 0) {
          color[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }

  std::vector<NaturalLoop> loops;
  for (const auto& [h, sources] : back_edges) {
    NaturalLoop loop;
    loop.header = BlockId(h);
    loop.blocks.insert(BlockId(h));
    std::vector<std::size_t> work;
    for (auto s : sources)
      if (loop.blocks.insert(BlockId(s)).second) work.push_back(s);
    while (!work.empty()) {
      auto v = work.back();
      work.pop_back();
      for (auto p : preds[v])
        if (idom[p] && loop.blocks.insert(BlockId(p)).second) work.push_back(p);
    }
    loops.push_back(std::move(loop));
  }
  std::sort(loops.begin(), loops.end(), [](const NaturalLoop& a, const NaturalLoop& b) {
    if (a.blocks.size() != b.blocks.size()) return a.blocks.size() > b.blocks.size();
    return a.header < b.header;
  });
  for (std::size_t i = 0; i < loops.size(); ++i) {
    for (std::size_t k = i; k-- > 0;) {
      if (loops[k].blocks.count(loops[i].header)) {
        loops[i].parent = k;
        break;
      }
    }
  }
  return loops;
}

llbc::Body restructure(const TranslatedCrate& crate, const ullbc::Body& body) {
  ullbc::Body copy = body;
  prune_unreachable(copy);
  return Restructurer(crate, std::move(copy)).run();
}

Diagnostics restructure_crate(TranslatedCrate& crate) {
  Diagnostics diags;
  for (auto& fun : crate.fun_decls) {
    const auto* body = std::get_if<ullbc::Body>(&fun.body);
    if (body == nullptr) continue;
    try {
      llbc::Body out = restructure(crate, *body);
      fun.body = std::move(out);
    } catch (const Error& e) {
      diags.push_back(Diagnostic{e.code(), e.span().value_or(fun.meta.span), e.what(), fun.meta.name});
      fun.body = OpaqueBody{};
    }
  }
  return diags;
}

Diagnostics validate_llbc(const llbc::Body& body) {
  LlbcChecker checker;
  if (!checker.block(body.body, 0))
    checker.diags.push_back({"unterminated-path", body.span, "body can fall off its end", ""});
  return checker.diags;
}

}  // namespace charon
