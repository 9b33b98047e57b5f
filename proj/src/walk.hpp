#pragma once

// Mutable traversal of every place and operand of a body, shared by the
// passes that rewrite locals or constants.

#include <functional>

#include "charon/ir.hpp"

namespace charon::detail {

struct Walker {
  std::function<void(Place&)> on_place;      // every place, including those inside index operands
  std::function<void(Operand&)> on_operand;  // every operand, before its place is visited
  std::function<void(Call&)> on_call;

  void place(Place& p) {
    if (on_place) on_place(p);
    for (auto& elem : p.projection)
      if (auto* ix = std::get_if<IndexProj>(&elem)) operand(*ix->index);
  }

  void operand(Operand& op) {
    if (on_operand) on_operand(op);
    if (auto* c = std::get_if<CopyOp>(&op.kind)) place(c->place);
    if (auto* m = std::get_if<MoveOp>(&op.kind)) place(m->place);
  }

  void rvalue(Rvalue& rv) {
    std::visit(Overloaded{
                   [&](UseRv& u) { operand(u.op); },
                   [&](BinaryRv& b) {
                     operand(b.lhs);
                     operand(b.rhs);
                   },
                   [&](UnaryRv& u) { operand(u.arg); },
                   [&](DiscriminantRv& d) { place(d.place); },
                   [&](AggregateRv& a) {
                     for (auto& op : a.ops) operand(op);
                   },
                   [&](RefRv& r) { place(r.place); },
               },
               rv.kind);
  }

  void call(Call& c) {
    if (on_call) on_call(c);
    if (auto* m = std::get_if<MoveFnOperand>(&c.func)) place(m->place);
    for (auto& a : c.args) operand(a);
    place(c.dest);
  }

  void shared(std::variant<Assign, Drop, Nop>& kind) {
    if (auto* a = std::get_if<Assign>(&kind)) {
      place(a->dest);
      rvalue(a->value);
    } else if (auto* d = std::get_if<Drop>(&kind)) {
      place(d->place);
    }
  }

  void terminator(ullbc::Terminator& t) {
    std::visit(Overloaded{
                   [&](ullbc::SwitchInt& s) { operand(s.discr); },
                   [&](ullbc::Match& m) { place(m.scrutinee); },
                   [&](ullbc::Assert& a) { operand(a.cond); },
                   [&](ullbc::CallTerm& c) { call(c.call); },
                   [](auto&) {},
               },
               t.kind);
  }

  void body(ullbc::Body& b) {
    for (auto& bb : b.blocks) {
      for (auto& st : bb.statements) shared(st.kind);
      terminator(bb.terminator);
    }
  }

  void block(llbc::Block& b) {
    for (auto& st : b.statements) {
      std::visit(Overloaded{
                     [&](Assign& a) {
                       place(a.dest);
                       rvalue(a.value);
                     },
                     [&](Drop& d) { place(d.place); },
                     [&](llbc::CallStmt& c) { call(c.call); },
                     [&](llbc::Loop& l) { block(l.body); },
                     [&](llbc::SwitchStmt& s) {
                       std::visit(Overloaded{
                                      [&](llbc::If& i) {
                                        operand(i.cond);
                                        block(i.then_block);
                                        block(i.else_block);
                                      },
                                      [&](llbc::SwitchInt& sw) {
                                        operand(sw.discr);
                                        for (auto& arm : sw.arms) block(arm.second);
                                        block(sw.otherwise);
                                      },
                                      [&](llbc::Match& m) {
                                        place(m.scrutinee);
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

  void body(llbc::Body& b) { block(b.body); }
};

}  // namespace charon::detail
