#include <gtest/gtest.h>

#include <map>
#include <set>

#include "charon/deps.hpp"
#include "charon/frontend.hpp"
#include "charon/passes.hpp"
#include "checks.hpp"
#include "corpus.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace charon;

namespace {

ullbc::Body& body_of(TranslatedCrate& crate, const std::string& fun) {
  for (auto& f : crate.fun_decls)
    if (f.meta.name == fun) return std::get<ullbc::Body>(f.body);
  throw std::runtime_error("no function " + fun);
}

std::string printed(const TranslatedCrate& crate, const std::string& fun) {
  return print_fun(crate, *crate.find_fun(fun));
}

// Body of `fun` printed after applying `pass` to it.
template <class Pass>
std::string after(const std::string& text, const std::string& fun, Pass pass) {
  auto crate = parse_crate(text);
  ullbc::Body body = body_of(crate, fun);
  pass(crate, body);
  body_of(crate, fun) = body;
  return printed(crate, fun);
}

const char* kOpt = "enum Opt<T> { None, Some(T) }\n";

}  // namespace

// ---------------------------------------------------------------------------
// Checked arithmetic

TEST(FuseCheckedArith, ThreeInstructionPattern) {
  std::string text =
      "fn f(a: u8, b: u8) -> u8 {\n"
      "  let t: (u8, bool);\n"
      "  bb0: { t = checked_add copy a, copy b; assert copy t.f1 == false -> bb1 }\n"
      "  bb1: { ret = use copy t.f0; return }\n"
      "}\n";
  auto out = after(text, "f", [](auto&, auto& b) { fuse_checked_arith(b); });
  EXPECT_EQ(out,
            "fn f(a: u8, b: u8) -> u8 {\n"
            "  bb0: {\n    ret = add copy a, copy b;\n    goto bb1\n  }\n"
            "  bb1: {\n    return\n  }\n"
            "}\n");
}

TEST(FuseCheckedArith, NonMatchingLeftAlone) {
  // an assert on an unrelated condition, and one expecting the overflow flag to be set
  std::string text =
      "fn f(a: u8, c: bool) -> u8 {\n"
      "  let t: (u8, bool);\n"
      "  bb0: { assert copy c == true -> bb1 }\n"
      "  bb1: { t = checked_mul copy a, copy a; assert copy t.f1 == true -> bb2 }\n"
      "  bb2: { ret = use copy t.f0; return }\n"
      "}\n";
  auto crate = parse_crate(text);
  EXPECT_EQ(after(text, "f", [](auto&, auto& b) { fuse_checked_arith(b); }), printed(crate, "f"));
}

TEST(FuseCheckedArith, SecondUseOfTemporaryBlocksFusion) {
  std::string text =
      "fn f(a: u8) -> (u8, bool) {\n"
      "  let t: (u8, bool);\n"
      "  let x: u8;\n"
      "  bb0: { t = checked_sub copy a, const 1u8; assert copy t.f1 == false -> bb1 }\n"
      "  bb1: { x = use copy t.f0; ret = use copy t; return }\n"
      "}\n";
  auto crate = parse_crate(text);
  EXPECT_EQ(after(text, "f", [](auto&, auto& b) { fuse_checked_arith(b); }), printed(crate, "f"));
}

// ---------------------------------------------------------------------------
// Panics

TEST(UnifyPanics, PanicCallAndUnreachable) {
  std::string text =
      "fn core::panicking::panic();\n"
      "fn f(c: bool) {\n"
      "  let z: ();\n"
      "  bb0: { switch copy c -> [0: bb1, otherwise: bb2] }\n"
      "  bb1: { z = call core::panicking::panic() -> bb3 }\n"
      "  bb2: { unreachable }\n"
      "  bb3: { return }\n"
      "}\n";
  auto crate = parse_crate(text);
  auto& body = body_of(crate, "f");
  unify_panics(crate, body, default_panic_functions());
  // bb3 was only reachable through the panic call's return edge
  ASSERT_EQ(body.blocks.size(), 3u);
  EXPECT_EQ(std::get<ullbc::Abort>(body.blocks[1].terminator.kind).kind, AbortKind::Panic);
  EXPECT_EQ(std::get<ullbc::Abort>(body.blocks[2].terminator.kind).kind, AbortKind::UndefinedBehavior);
  EXPECT_EQ(oracle::reachable(body).size(), body.blocks.size());
}

TEST(UnifyPanics, ConfigurablePanicSet) {
  std::string text =
      "fn my::fail();\n"
      "fn f() {\n  let z: ();\n  bb0: { z = call my::fail() -> bb1 }\n  bb1: { return }\n}\n";
  auto crate = parse_crate(text);
  auto& body = body_of(crate, "f");
  auto before = body;
  unify_panics(crate, body, default_panic_functions());
  EXPECT_EQ(body, before);
  auto set = default_panic_functions();
  set.insert("my::fail");
  unify_panics(crate, body, set);
  EXPECT_EQ(body.blocks.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<ullbc::Abort>(body.blocks[0].terminator.kind));
}

TEST(UnifyPanics, PrunesAgainstReachabilityOracle) {
  for (int i = 0; i < 100; ++i) {
    gen::Rng rng(400 + static_cast<std::uint64_t>(i));
    auto crate = parse_crate(gen::random_cfg_program(rng));
    auto& body = body_of(crate, "f");
    // the blocks that survive are those reachable once panic edges are cut
    auto cut = body;
    for (auto& bb : cut.blocks) {
      if (const auto* c = std::get_if<ullbc::CallTerm>(&bb.terminator.kind)) {
        const auto* fp = std::get_if<FnPtr>(&c->call.func);
        const auto* fr = fp ? std::get_if<FunRef>(&fp->func) : nullptr;
        if (fr && default_panic_functions().count(crate.fun_decl(fr->id)->meta.name))
          bb.terminator.kind = ullbc::Abort{AbortKind::Panic};
      }
    }
    std::size_t expected = oracle::reachable(cut).size();
    unify_panics(crate, body, default_panic_functions());
    ASSERT_EQ(body.blocks.size(), expected) << "seed " << 400 + i;
  }
}

// ---------------------------------------------------------------------------
// Matches

TEST(ReconstructMatches, TwoVariantEnum) {
  std::string text = std::string(kOpt) +
                     "fn f(o: Opt<u8>) -> u8 {\n"
                     "  let d: i64;\n"
                     "  bb0: { d = discriminant o; switch copy d -> [0: bb1, otherwise: bb2] }\n"
                     "  bb1: { ret = use const 0u8; return }\n"
                     "  bb2: { ret = use copy o.as Some.f0; return }\n"
                     "}\n";
  auto out = after(text, "f", [](auto& c, auto& b) { EXPECT_TRUE(reconstruct_matches(c, b).empty()); });
  EXPECT_EQ(out,
            "fn f(o: Opt<u8>) -> u8 {\n"
            "  bb0: {\n    match o -> [None: bb1, otherwise: bb2]\n  }\n"
            "  bb1: {\n    ret = use const 0u8;\n    return\n  }\n"
            "  bb2: {\n    ret = use copy o.as Some.f0;\n    return\n  }\n"
            "}\n");
}

TEST(ReconstructMatches, PlainIntegerSwitchUnchanged) {
  std::string text =
      "fn f(x: u8) -> u8 {\n"
      "  bb0: { switch copy x -> [0: bb1, otherwise: bb2] }\n"
      "  bb1: { ret = use const 0u8; return }\n"
      "  bb2: { ret = use const 1u8; return }\n"
      "}\n";
  auto crate = parse_crate(text);
  EXPECT_EQ(after(text, "f", [](auto& c, auto& b) { reconstruct_matches(c, b); }), printed(crate, "f"));
}

TEST(ReconstructMatches, SharedTargetsAndExplicitDiscriminants) {
  std::string text =
      "enum E { A = 10, B = 20, C = -1 }\n"
      "fn f(e: E) -> u8 {\n"
      "  let d: i64;\n"
      "  bb0: { d = discriminant e; switch copy d -> [10: bb1, 20: bb1, -1: bb2, otherwise: bb2] }\n"
      "  bb1: { ret = use const 0u8; return }\n"
      "  bb2: { ret = use const 1u8; return }\n"
      "}\n";
  auto crate = parse_crate(text);
  auto& body = body_of(crate, "f");
  EXPECT_TRUE(reconstruct_matches(crate, body).empty());
  const auto& m = std::get<ullbc::Match>(body.blocks[0].terminator.kind);
  ASSERT_EQ(m.cases.size(), 3u);
  EXPECT_EQ(m.cases[0], std::make_pair(VariantId(0), BlockId(1)));
  EXPECT_EQ(m.cases[1], std::make_pair(VariantId(1), BlockId(1)));
  EXPECT_EQ(m.cases[2], std::make_pair(VariantId(2), BlockId(2)));
  EXPECT_FALSE(m.otherwise.has_value());  // every variant covered
  EXPECT_EQ(body.locals.size(), 2u);      // temporary removed
}

TEST(ReconstructMatches, BadDiscriminantLeavesBody) {
  std::string text = std::string(kOpt) +
                     "fn f(o: Opt<u8>) -> u8 {\n"
                     "  let d: i64;\n"
                     "  bb0: { d = discriminant o; switch copy d -> [5: bb1, otherwise: bb2] }\n"
                     "  bb1: { ret = use const 0u8; return }\n"
                     "  bb2: { ret = use const 1u8; return }\n"
                     "}\n";
  auto crate = parse_crate(text);
  auto& body = body_of(crate, "f");
  auto before = body;
  auto diags = reconstruct_matches(crate, body);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "bad-discriminant");
  EXPECT_EQ(diags[0].span.beg_line, 4u);
  EXPECT_EQ(body, before);
}

TEST(ReconstructMatches, ReusedTemporaryKeepsAssignment) {
  std::string text = std::string(kOpt) +
                     "fn f(o: Opt<u8>) -> i64 {\n"
                     "  let d: i64;\n"
                     "  bb0: { d = discriminant o; switch copy d -> [0: bb1, otherwise: bb2] }\n"
                     "  bb1: { ret = use copy d; return }\n"
                     "  bb2: { ret = use const 7i64; return }\n"
                     "}\n";
  auto crate = parse_crate(text);
  auto& body = body_of(crate, "f");
  reconstruct_matches(crate, body);
  EXPECT_TRUE(std::holds_alternative<ullbc::Match>(body.blocks[0].terminator.kind));
  EXPECT_EQ(body.blocks[0].statements.size(), 1u);
}

// ---------------------------------------------------------------------------
// Constants

TEST(Constants, DecodeExamples) {
  auto crate = parse_crate(kOpt);
  auto u32 = Ty::scalar(ScalarKind::U32);
  EXPECT_EQ(decode_constant(crate, u32, {0x2a, 0, 0, 0}), ConstantValue::scalar(ScalarKind::U32, 42));
  auto opt = parse_constant(crate, "Opt<u32>::None").ty;
  auto some = decode_constant(crate, opt, {0x01, 0x2a, 0, 0, 0});
  EXPECT_EQ(some, parse_constant(crate, "Opt<u32>::Some(42u32)"));
  EXPECT_EQ(std::get<AdtConst>(some.kind).variant, VariantId(1));
  // inverses
  EXPECT_EQ(encode_constant(crate, some), (std::vector<std::uint8_t>{0x01, 0x2a, 0, 0, 0}));
  EXPECT_EQ(encode_constant(crate, ConstantValue::scalar(ScalarKind::U32, 42)), (std::vector<std::uint8_t>{0x2a, 0, 0, 0}));
  EXPECT_EQ(encode_constant(crate, parse_constant(crate, "-2i16")), (std::vector<std::uint8_t>{0xfe, 0xff}));
  EXPECT_EQ(encode_constant(crate, parse_constant(crate, "(true, 1u8)")), (std::vector<std::uint8_t>{0x01, 0x01}));
}

TEST(Constants, DecodeErrors) {
  auto crate = parse_crate(kOpt);
  auto opt = parse_constant(crate, "Opt<u32>::None").ty;
  auto code = [&](const Ty& ty, std::vector<std::uint8_t> bytes) {
    try {
      decode_constant(crate, ty, bytes);
    } catch (const Error& e) {
      return e.code();
    }
    return std::string("none");
  };
  EXPECT_EQ(code(Ty::scalar(ScalarKind::U32), {1, 2, 3}), "decode-error");     // too short
  EXPECT_EQ(code(Ty::scalar(ScalarKind::U8), {1, 2}), "decode-error");         // trailing byte
  EXPECT_EQ(code(opt, {0x02, 0, 0, 0, 0}), "decode-error");                    // no variant 2
  EXPECT_EQ(code(Ty::boolean(), {0x02}), "decode-error");                      // bool byte
  EXPECT_EQ(code(opt, {0x00}), "none");
}

TEST(Constants, EncodeRejectsOutOfRange) {
  auto crate = parse_crate("");
  try {
    encode_constant(crate, ConstantValue::scalar(ScalarKind::U8, 256));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "encode-error");
  }
}

TEST(Constants, RandomRoundTrip) {
  for (int i = 0; i < 200; ++i) {
    gen::Rng rng(500 + static_cast<std::uint64_t>(i));
    auto crate = parse_crate(gen::random_type_decls(rng));
    Ty ty = gen::random_type(rng, crate, 4);
    auto value = gen::random_constant(rng, crate, ty);
    auto bytes = encode_constant(crate, value);
    ASSERT_EQ(decode_constant(crate, ty, bytes), value) << print_constant(crate, value);
    ASSERT_EQ(encode_constant(crate, decode_constant(crate, ty, bytes)), bytes);
  }
}

TEST(Constants, UndecodableConstantMakesOnlyThatBodyOpaque) {
  auto crate = parse_crate(corpus::read_file(corpus::source_dir() + "/corpus/poisoned.mirl"));
  auto diags = decode_constants(crate);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "decode-error");
  EXPECT_EQ(diags[0].item, "bad");
  EXPECT_EQ(diags[0].span.beg_line, 11u);
  EXPECT_TRUE(std::holds_alternative<OpaqueBody>(crate.find_fun("bad")->body));
  EXPECT_TRUE(std::holds_alternative<ullbc::Body>(crate.find_fun("good")->body));
  EXPECT_TRUE(std::holds_alternative<ullbc::Body>(crate.find_fun("also_good")->body));
  EXPECT_EQ(checks::raw_constants(crate), 0u);
}

TEST(Constants, CorpusRawConstants) {
  auto crate = parse_crate(corpus::read_file(corpus::source_dir() + "/corpus/raw_consts.mirl"));
  EXPECT_GT(checks::raw_constants(crate), 0u);
  EXPECT_TRUE(decode_constants(crate).empty());
  EXPECT_EQ(checks::raw_constants(crate), 0u);
  EXPECT_NE(printed(crate, "pick").find("Pair { 4660u16, false }"), std::string::npos) << printed(crate, "pick");
  EXPECT_NE(printed(crate, "tag").find("E::B(7u8, -7i8)"), std::string::npos) << printed(crate, "tag");
}

// ---------------------------------------------------------------------------
// Declaration groups

namespace {

std::string call_chain(const std::vector<std::pair<int, int>>& edges, int n) {
  std::string text;
  for (int f = 0; f < n; ++f) {
    std::vector<int> callees;
    for (auto [a, b] : edges)
      if (a == f) callees.push_back(b);
    text += "fn f" + std::to_string(f) + "() {\n  let z: ();\n";
    for (std::size_t k = 0; k < callees.size(); ++k)
      text += "  bb" + std::to_string(k) + ": { z = call f" + std::to_string(callees[k]) + "() -> bb" +
              std::to_string(k + 1) + " }\n";
    text += "  bb" + std::to_string(callees.size()) + ": { return }\n}\n";
  }
  return text;
}

}  // namespace

TEST(DeclGroups, IndependentFunctionsInIdOrder) {
  auto crate = parse_crate("fn b() { bb0: { return } }\nfn a() { bb0: { return } }");
  auto groups = compute_decl_groups(crate);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0], (DeclGroup{false, {FunDeclId(0)}}));
  EXPECT_EQ(groups[1], (DeclGroup{false, {FunDeclId(1)}}));
}

TEST(DeclGroups, MutualRecursion) {
  auto crate = parse_crate(corpus::read_file(corpus::source_dir() + "/corpus/even_odd.mirl"));
  auto groups = compute_decl_groups(crate);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0], (DeclGroup{true, {FunDeclId(0), FunDeclId(1)}}));
  EXPECT_EQ(groups[1], (DeclGroup{false, {FunDeclId(2)}}));
}

TEST(DeclGroups, SelfRecursionIsRecursive) {
  auto crate = parse_crate(call_chain({{0, 0}}, 1));
  EXPECT_EQ(compute_decl_groups(crate), (std::vector<DeclGroup>{{true, {FunDeclId(0)}}}));
}

TEST(DeclGroups, RandomGraphsAgainstReachabilityOracle) {
  for (int i = 0; i < 100; ++i) {
    gen::Rng rng(600 + static_cast<std::uint64_t>(i));
    int n = std::uniform_int_distribution<int>(1, 9)(rng);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (std::bernoulli_distribution(b < a ? 0.3 : 0.08)(rng)) edges.emplace_back(a, b);
    auto crate = parse_crate(call_chain(edges, n));
    auto groups = compute_decl_groups(crate);

    // reach[a][b]: b reachable from a by one or more calls
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (auto [a, b] : edges) reach[a][b] = true;
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (reach[a][k] && reach[k][b]) reach[a][b] = true;

    std::map<int, std::size_t> group_of;
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (const auto& m : groups[g].members) group_of[static_cast<int>(std::get<FunDeclId>(m).index)] = g;
    ASSERT_EQ(group_of.size(), static_cast<std::size_t>(n)) << "seed " << 600 + i;
    for (int a = 0; a < n; ++a) {
      EXPECT_EQ(groups[group_of[a]].recursive, reach[a][a]) << "seed " << 600 + i << " f" << a;
      for (int b = 0; b < n; ++b) {
        bool same = a == b || (reach[a][b] && reach[b][a]);
        EXPECT_EQ(group_of[a] == group_of[b], same) << "seed " << 600 + i << " f" << a << " f" << b;
        // dependencies first
        if (reach[a][b] && !same) EXPECT_LT(group_of[b], group_of[a]) << "seed " << 600 + i;
      }
    }
  }
}

TEST(DeclGroups, CrossGroupReferencesPointBackwards) {
  for (const auto& p : corpus::load("corpus")) {
    auto crate = parse_crate(p.text);
    run_pipeline(crate);
    std::map<AnyDeclId, std::size_t> group_of;
    for (std::size_t g = 0; g < crate.decl_groups.size(); ++g)
      for (const auto& m : crate.decl_groups[g].members) group_of[m] = g;
    ASSERT_EQ(group_of.size(), crate.decl_count()) << p.name;
    for (const auto& id : all_decl_ids(crate))
      for (const auto& dep : decl_dependencies(crate, id)) EXPECT_LE(group_of[dep], group_of[id]) << p.name;
  }
}

// ---------------------------------------------------------------------------
// Pipeline

TEST(Pipeline, AllDisabledIsIdentity) {
  for (const auto& p : corpus::load("corpus")) {
    auto crate = parse_crate(p.text);
    auto copy = crate;
    EXPECT_TRUE(run_pipeline(crate, PassConfig::none()).empty());
    EXPECT_EQ(crate, copy) << p.name;
  }
}

TEST(Pipeline, EachPassCanBeSkipped) {
  auto text = corpus::read_file(corpus::source_dir() + "/corpus/option_match.mirl");
  auto full = parse_crate(text);
  run_pipeline(full);
  auto no_matches = parse_crate(text);
  PassConfig cfg;
  cfg.reconstruct_matches = false;
  run_pipeline(no_matches, cfg);
  EXPECT_EQ(checks::discriminant_switches(full), 0u);
  EXPECT_GT(checks::discriminant_switches(no_matches), 0u);
  auto no_groups = parse_crate(text);
  cfg = PassConfig{};
  cfg.decl_groups = false;
  run_pipeline(no_groups, cfg);
  EXPECT_TRUE(no_groups.decl_groups.empty());
  EXPECT_FALSE(full.decl_groups.empty());
}

TEST(Pipeline, IdempotentOnCorpus) {
  for (const auto& p : corpus::load("corpus")) {
    auto once = parse_crate(p.text);
    run_pipeline(once);
    auto twice = once;
    run_pipeline(twice);
    EXPECT_EQ(twice, once) << p.name;
  }
}

TEST(Pipeline, RobustToOneBadConstant) {
  auto crate = parse_crate(corpus::read_file(corpus::source_dir() + "/corpus/poisoned.mirl"));
  auto diags = run_pipeline(crate);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(crate.fun_decls.size(), 3u);
  EXPECT_EQ(crate.type_decls.size(), 1u);
  EXPECT_TRUE(validate_crate(crate).empty());
}

TEST(Pipeline, SoundOnRandomPrograms) {
  checks::Tally tally;
  gen::Rng inputs(8);
  for (int i = 0; i < 40; ++i) {
    gen::Rng rng(700 + static_cast<std::uint64_t>(i));
    checks::pass_soundness("seed " + std::to_string(700 + i), gen::random_cfg_program(rng), inputs, 10, 2000, tally);
  }
  EXPECT_TRUE(tally.ok()) << tally.summary();
  EXPECT_GT(tally.cases, 1000u);
}

TEST(Pipeline, SoundOnCorpus) {
  checks::Tally tally;
  gen::Rng inputs(9);
  for (const auto& p : corpus::load("corpus")) checks::pass_soundness(p.name, p.text, inputs, 10, 100000, tally);
  EXPECT_TRUE(tally.ok()) << tally.summary();
}

TEST(Pipeline, InlineRawScalarsOracle) {
  EXPECT_EQ(checks::inline_raw_scalars("x = use const raw(fe ff): i16;"), "x = use const -2i16;");
  EXPECT_EQ(checks::inline_raw_scalars("x = use const raw(2a000000): u32;"), "x = use const 42u32;");
  EXPECT_EQ(checks::inline_raw_scalars("x = use const raw(01): bool;"), "x = use const true;");
  EXPECT_EQ(checks::inline_raw_scalars("x = use const raw(01 00): Opt<u8>;"), std::nullopt);
}
