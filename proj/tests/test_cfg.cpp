#include <gtest/gtest.h>

#include <functional>

#include "charon/cfg.hpp"
#include "charon/frontend.hpp"
#include "charon/passes.hpp"
#include "checks.hpp"
#include "corpus.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace charon;

namespace {

ullbc::Body cfg_of(const std::string& text, const std::string& fun = "f") {
  auto crate = parse_crate(text);
  return std::get<ullbc::Body>(crate.find_fun(fun)->body);
}

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

std::size_t statement_count(const llbc::Block& block) {
  std::size_t n = 0;
  for (const auto& st : block.statements) {
    ++n;
    if (const auto* l = std::get_if<llbc::Loop>(&st.kind)) n += statement_count(l->body);
    if (const auto* s = std::get_if<llbc::SwitchStmt>(&st.kind)) {
      if (const auto* i = std::get_if<llbc::If>(&s->sw)) n += statement_count(i->then_block) + statement_count(i->else_block);
      if (const auto* w = std::get_if<llbc::SwitchInt>(&s->sw)) {
        for (const auto& [v, b] : w->arms) n += statement_count(b);
        n += statement_count(w->otherwise);
      }
      if (const auto* m = std::get_if<llbc::Match>(&s->sw)) {
        for (const auto& [v, b] : m->arms) n += statement_count(b);
        if (m->otherwise) n += statement_count(*m->otherwise);
      }
    }
  }
  return n;
}

std::size_t instruction_count(const ullbc::Body& body) {
  std::size_t n = 0;
  for (const auto& bb : body.blocks) n += bb.statements.size() + 1;
  return n;
}

const char* kDiamond =
    "fn f(c: bool) -> u8 {\n"
    "  bb0: { switch copy c -> [0: bb1, otherwise: bb2] }\n"
    "  bb1: { ret = use const 1u8; goto bb3 }\n"
    "  bb2: { ret = use const 2u8; goto bb3 }\n"
    "  bb3: { return }\n"
    "}\n";

const char* kNested =
    "fn f(n: u8) -> u8 {\n"
    "  let i: u8;\n  let j: u8;\n  let c: bool;\n"
    "  bb0: { i = use const 0u8; goto bb1 }\n"
    "  bb1: { c = lt copy i, copy n; switch copy c -> [0: bb5, otherwise: bb2] }\n"
    "  bb2: { j = use const 0u8; goto bb3 }\n"
    "  bb3: { c = lt copy j, copy i; switch copy c -> [0: bb4, otherwise: bb6] }\n"
    "  bb4: { i = wrapping_add copy i, const 1u8; goto bb1 }\n"
    "  bb5: { ret = use copy i; return }\n"
    "  bb6: { j = wrapping_add copy j, const 1u8; ret = wrapping_add copy ret, const 1u8; goto bb3 }\n"
    "}\n";

}  // namespace

TEST(Dominators, Chain) {
  auto body = cfg_of("fn f() { bb0: { goto bb1 } bb1: { goto bb2 } bb2: { return } }");
  auto idom = compute_dominators(body);
  EXPECT_EQ(idom, (DominatorTree{BlockId(0), BlockId(0), BlockId(1)}));
  EXPECT_TRUE(dominates(idom, BlockId(0), BlockId(2)));
  EXPECT_FALSE(dominates(idom, BlockId(2), BlockId(1)));
}

TEST(Dominators, DiamondJoinIsDominatedByEntryOnly) {
  auto idom = compute_dominators(cfg_of(kDiamond));
  EXPECT_EQ(idom[3], BlockId(0));
  EXPECT_FALSE(dominates(idom, BlockId(1), BlockId(3)));
}

TEST(Dominators, UnreachableBlockHasNoEntry) {
  auto idom = compute_dominators(cfg_of("fn f() { bb0: { return } bb1: { goto bb0 } }"));
  EXPECT_FALSE(idom[1].has_value());
}

TEST(Dominators, RandomAgainstOracle) {
  for (int i = 0; i < 300; ++i) {
    gen::Rng rng(900 + static_cast<std::uint64_t>(i));
    auto body = cfg_of(gen::random_cfg_program(rng));
    auto idom = compute_dominators(body);
    auto expected = oracle::dominators(body);
    for (std::size_t b = 0; b < body.blocks.size(); ++b) {
      std::set<std::size_t> got;
      if (idom[b]) {
        for (std::size_t x = b;; x = idom[x]->index) {
          got.insert(x);
          if (x == 0) break;
        }
      }
      ASSERT_EQ(got, expected[b]) << "seed " << 900 + i << " bb" << b;
      for (std::size_t a = 0; a < body.blocks.size(); ++a)
        if (idom[b]) ASSERT_EQ(dominates(idom, BlockId(a), BlockId(b)), expected[b].count(a) == 1);
    }
  }
}

TEST(Loops, SelfLoop) {
  auto body = cfg_of("fn f() { bb0: { goto bb1 } bb1: { goto bb1 } }");
  auto loops = find_loops(body, compute_dominators(body));
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops[0].header, BlockId(1));
  EXPECT_EQ(loops[0].blocks, std::set<BlockId>{BlockId(1)});
}

TEST(Loops, NestedOuterFirst) {
  auto body = cfg_of(kNested);
  auto loops = find_loops(body, compute_dominators(body));
  ASSERT_EQ(loops.size(), 2u);
  EXPECT_EQ(loops[0].header, BlockId(1));
  EXPECT_EQ(loops[0].blocks, (std::set<BlockId>{BlockId(1), BlockId(2), BlockId(3), BlockId(4), BlockId(6)}));
  EXPECT_FALSE(loops[0].parent.has_value());
  EXPECT_EQ(loops[1].header, BlockId(3));
  EXPECT_EQ(loops[1].blocks, (std::set<BlockId>{BlockId(3), BlockId(6)}));
  EXPECT_EQ(loops[1].parent, std::optional<std::size_t>(0));
}

TEST(Loops, IrreducibleRejected) {
  auto body = cfg_of(corpus::read_file(corpus::source_dir() + "/corpus/irreducible.mirl"), "tangle");
  ASSERT_FALSE(oracle::reducible(body));
  auto idom = compute_dominators(body);
  EXPECT_EQ(error_code([&] { find_loops(body, idom); }), "irreducible-cfg");
  EXPECT_EQ(error_code([&] { restructure(TranslatedCrate{}, body); }), "irreducible-cfg");
}

TEST(Loops, RandomAgainstOracle) {
  int reducible = 0;
  for (int i = 0; i < 300; ++i) {
    gen::Rng rng(1300 + static_cast<std::uint64_t>(i));
    auto body = cfg_of(gen::random_cfg_program(rng));
    auto idom = compute_dominators(body);
    if (!oracle::reducible(body)) {
      EXPECT_EQ(error_code([&] { find_loops(body, idom); }), "irreducible-cfg") << "seed " << 1300 + i;
      continue;
    }
    ++reducible;
    auto loops = find_loops(body, idom);
    auto expected = oracle::natural_loops(body);
    ASSERT_EQ(loops.size(), expected.size()) << "seed " << 1300 + i;
    for (std::size_t k = 0; k < loops.size(); ++k) {
      const auto& l = loops[k];
      std::set<std::size_t> blocks;
      for (auto b : l.blocks) blocks.insert(b.index);
      ASSERT_EQ(blocks, expected.at(l.header.index)) << "seed " << 1300 + i;
      // parent is the smallest earlier loop containing the header, and encloses it entirely
      if (l.parent) {
        ASSERT_LT(*l.parent, k);
        for (auto b : l.blocks) EXPECT_TRUE(loops[*l.parent].blocks.count(b));
      } else {
        for (std::size_t o = 0; o < k; ++o) EXPECT_FALSE(loops[o].blocks.count(l.header));
      }
    }
  }
  EXPECT_GT(reducible, 100);
}

TEST(Restructure, WhileShape) {
  auto crate = corpus::translate(corpus::read_file(corpus::source_dir() + "/corpus/while_shape.mirl"));
  const auto& body = std::get<llbc::Body>(crate.find_fun("count_down")->body);
  const auto& top = body.body.statements;
  ASSERT_EQ(top.size(), 4u);
  const auto& loop = std::get<llbc::Loop>(top[1].kind);
  ASSERT_EQ(loop.body.statements.size(), 2u);
  const auto& cond = std::get<llbc::If>(std::get<llbc::SwitchStmt>(loop.body.statements[1].kind).sw);
  EXPECT_EQ(std::get<llbc::Continue>(cond.then_block.statements.back().kind).depth, 0u);
  EXPECT_EQ(std::get<llbc::Break>(cond.else_block.statements.back().kind).depth, 0u);
  EXPECT_TRUE(std::holds_alternative<llbc::ReturnStmt>(top[3].kind));
}

TEST(Restructure, DiamondHasNoLoop) {
  auto body = restructure(TranslatedCrate{}, cfg_of(kDiamond));
  ASSERT_EQ(body.body.statements.size(), 2u);
  const auto& cond = std::get<llbc::If>(std::get<llbc::SwitchStmt>(body.body.statements[0].kind).sw);
  EXPECT_EQ(cond.then_block.statements.size(), 1u);  // join placed after the if, not duplicated
  EXPECT_TRUE(std::holds_alternative<llbc::ReturnStmt>(body.body.statements[1].kind));
}

TEST(Restructure, NestedBreaksAndContinues) {
  auto body = restructure(TranslatedCrate{}, cfg_of(kNested));
  EXPECT_TRUE(validate_llbc(body).empty());
  std::size_t loops = 0;
  std::function<void(const llbc::Block&)> walk = [&](const llbc::Block& b) {
    for (const auto& st : b.statements) {
      if (const auto* l = std::get_if<llbc::Loop>(&st.kind)) {
        ++loops;
        walk(l->body);
      }
      if (const auto* s = std::get_if<llbc::SwitchStmt>(&st.kind))
        if (const auto* i = std::get_if<llbc::If>(&s->sw)) {
          walk(i->then_block);
          walk(i->else_block);
        }
    }
  };
  walk(body.body);
  EXPECT_EQ(loops, 2u);
}

TEST(Restructure, OutputValidatesAndIsDeterministic) {
  for (int i = 0; i < 200; ++i) {
    gen::Rng rng(1700 + static_cast<std::uint64_t>(i));
    auto text = gen::random_reducible_program(rng);
    auto crate = parse_crate(text);
    run_pipeline(crate);
    const auto& body = std::get<ullbc::Body>(crate.find_fun("f")->body);
    llbc::Body out;
    try {
      out = restructure(crate, body);
    } catch (const Error& e) {
      FAIL() << "seed " << 1700 + i << ": " << e.what() << "\n" << text;
    }
    for (const auto& d : validate_llbc(out)) ADD_FAILURE() << "seed " << 1700 + i << ": " << to_string(d);
    EXPECT_EQ(restructure(crate, body), out);
    EXPECT_LE(statement_count(out.body), static_cast<std::size_t>(kDuplicationCap) * instruction_count(body))
        << "seed " << 1700 + i;
  }
}

TEST(ValidateLlbc, BadBreakDepthAndFallOff) {
  llbc::Body body;
  llbc::Loop loop;
  loop.body.statements.push_back(llbc::Statement{{}, {}, {}, llbc::Break{1}});
  body.body.statements.push_back(llbc::Statement{{}, {}, {}, loop});
  auto diags = validate_llbc(body);
  ASSERT_FALSE(diags.empty());
  EXPECT_EQ(diags[0].code, "bad-break-depth");

  llbc::Body empty;
  diags = validate_llbc(empty);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "unterminated-path");

  llbc::Body ok;
  ok.body.statements.push_back(llbc::Statement{{}, {}, {}, llbc::ReturnStmt{}});
  EXPECT_TRUE(validate_llbc(ok).empty());
}

TEST(RestructureCrate, FailureMakesOnlyThatBodyOpaque) {
  auto crate = parse_crate(corpus::read_file(corpus::source_dir() + "/corpus/irreducible.mirl"));
  auto diags = restructure_crate(crate);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "irreducible-cfg");
  EXPECT_EQ(diags[0].item, "tangle");
  EXPECT_TRUE(std::holds_alternative<OpaqueBody>(crate.find_fun("tangle")->body));
  EXPECT_TRUE(std::holds_alternative<llbc::Body>(crate.find_fun("plain")->body));
}

TEST(RestructureCrate, TwinInterpretersOnCorpus) {
  checks::Tally tally;
  gen::Rng rng(12);
  for (const auto& p : corpus::load("corpus")) checks::twin(p.name, p.text, rng, 10, 100000, tally);
  EXPECT_TRUE(tally.ok()) << tally.summary();
  EXPECT_EQ(tally.skipped, 1u);  // tangle
}

TEST(RestructureCrate, TwinInterpretersOnRandomPrograms) {
  checks::Tally tally;
  gen::Rng inputs(13);
  for (int i = 0; i < 50; ++i) {
    gen::Rng rng(2000 + static_cast<std::uint64_t>(i));
    checks::twin("seed " + std::to_string(2000 + i), gen::random_cfg_program(rng), inputs, 10, 2000, tally);
  }
  EXPECT_TRUE(tally.ok()) << tally.summary();
  EXPECT_GT(tally.cases, 200u);
}
