#include <gtest/gtest.h>

#include "charon/frontend.hpp"
#include "charon/passes.hpp"
#include "corpus.hpp"
#include "gen.hpp"

using namespace charon;

namespace {

ParseError parse_error(const std::string& text) {
  try {
    parse_crate(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "parsed without error:\n" << text;
  return ParseError("none", "", Span{});
}

TranslatedCrate reparse(const TranslatedCrate& crate) {
  auto again = parse_crate(pretty_print(crate), crate.crate_name);
  erase_spans(again);
  return again;
}

TranslatedCrate without_spans(TranslatedCrate c) {
  erase_spans(c);
  return c;
}

bool within(const Span& inner, const Span& outer) {
  auto before = [](std::uint32_t l1, std::uint32_t c1, std::uint32_t l2, std::uint32_t c2) {
    return l1 < l2 || (l1 == l2 && c1 <= c2);
  };
  return inner.file == outer.file && before(outer.beg_line, outer.beg_col, inner.beg_line, inner.beg_col) &&
         before(inner.end_line, inner.end_col, outer.end_line, outer.end_col);
}

}  // namespace

TEST(Parse, Identity) {
  auto crate = parse_crate("fn id<T>(x: T) -> T { bb0: { ret = use move x; return } }");
  ASSERT_EQ(crate.fun_decls.size(), 1u);
  const auto& f = crate.fun_decls[0];
  EXPECT_EQ(f.meta.name, "id");
  EXPECT_EQ(f.signature.generics.types.size(), 1u);
  const auto& body = std::get<ullbc::Body>(f.body);
  EXPECT_EQ(body.locals.size(), 2u);
  EXPECT_EQ(body.arg_count, 1u);
  EXPECT_TRUE(validate_crate(crate).empty());
}

TEST(Parse, UnknownBlock) {
  auto e = parse_error("fn f() {\n  bb0: { goto bb9 }\n}");
  EXPECT_EQ(e.code(), "unknown-block");
  ASSERT_TRUE(e.span());
  EXPECT_EQ(e.span()->beg_line, 2u);
  EXPECT_EQ(e.span()->beg_col, 15u);
}

TEST(Parse, SyntaxErrorListsExpectedTokens) {
  auto e = parse_error("fn f() { bb0: { ret = use 3u8; return } }");
  EXPECT_EQ(e.code(), "syntax-error");
  auto& exp = e.expected();
  EXPECT_NE(std::find(exp.begin(), exp.end(), "copy"), exp.end()) << e.what();
  EXPECT_NE(std::find(exp.begin(), exp.end(), "const"), exp.end()) << e.what();
}

TEST(Parse, NameResolutionErrors) {
  EXPECT_EQ(parse_error("fn f() -> Missing { bb0: { return } }").code(), "unknown-name");
  EXPECT_EQ(parse_error("fn f() { bb0: { ret = call g() -> bb1 } bb1: { return } }").code(), "unknown-name");
  EXPECT_EQ(parse_error("fn f() { bb0: { return } }\nfn f() { bb0: { return } }").code(), "duplicate-name");
  EXPECT_EQ(parse_error("struct S { a: u8 }\nenum S { A }").code(), "duplicate-name");
  EXPECT_EQ(parse_error("fn f() { bb0: { y = use const 1u8; return } }").code(), "unknown-name");
}

TEST(Parse, ArityErrors) {
  EXPECT_EQ(parse_error("type Vec<T>;\nfn f(x: Vec<u8, u8>) { bb0: { return } }").code(), "arity-mismatch");
}

TEST(Parse, LexError) { EXPECT_EQ(parse_error("fn f() { bb0: { return } } $").code(), "lex-error"); }

TEST(Parse, OpaqueAttributeAndMissingBody) {
  auto crate = parse_crate("#[charon::opaque]\nfn f() { bb0: { return } }\nfn g();");
  EXPECT_TRUE(std::holds_alternative<OpaqueBody>(crate.fun_decls[0].body));
  EXPECT_TRUE(std::holds_alternative<OpaqueBody>(crate.fun_decls[1].body));
  EXPECT_EQ(crate.fun_decls[0].meta.attributes, std::vector<std::string>{"charon::opaque"});
}

TEST(Parse, RawConstantsStayRaw) {
  auto crate = parse_crate("fn f() -> u32 { bb0: { ret = use const raw(2a000000): u32; return } }");
  const auto& st = std::get<ullbc::Body>(crate.fun_decls[0].body).blocks[0].statements[0];
  const auto& op = std::get<UseRv>(std::get<Assign>(st.kind).value.kind).op;
  const auto& c = std::get<ConstOp>(op.kind).value;
  ASSERT_TRUE(std::holds_alternative<RawConst>(c.kind));
  EXPECT_EQ(std::get<RawConst>(c.kind).bytes, (std::vector<std::uint8_t>{0x2a, 0, 0, 0}));
}

TEST(Parse, CommentsAttachToNextStatement) {
  auto crate = parse_crate("fn f() {\n  bb0: {\n    // first\n    // second\n    nop;\n    // before return\n    return\n  }\n}");
  const auto& bb = std::get<ullbc::Body>(crate.fun_decls[0].body).blocks[0];
  EXPECT_EQ(bb.statements[0].comments, (std::vector<std::string>{"first", "second"}));
  EXPECT_EQ(bb.terminator.comments, std::vector<std::string>{"before return"});
}

TEST(Parse, SecretAndDeclassifyAttributes) {
  auto crate = parse_crate("fn f(#[secret] k: u8) -> u8 { bb0: { #[declassify] ret = use copy k; return } }");
  const auto& body = std::get<ullbc::Body>(crate.fun_decls[0].body);
  EXPECT_EQ(body.locals[1].attributes, std::vector<std::string>{"secret"});
  EXPECT_EQ(body.blocks[0].statements[0].attributes, std::vector<std::string>{"declassify"});
}

TEST(Print, EmptyCrateIsEmptyText) { EXPECT_EQ(pretty_print(TranslatedCrate{}), ""); }

TEST(Print, Deterministic) {
  std::string text = "fn f(x: u8) -> u8 { bb0: { ret = add copy x, const 1u8; return } }";
  EXPECT_EQ(pretty_print(parse_crate(text)), pretty_print(parse_crate(text)));
  EXPECT_EQ(pretty_print(parse_crate(text)), "fn f(x: u8) -> u8 {\n  bb0: {\n    ret = add copy x, const 1u8;\n    return\n  }\n}\n");
}

TEST(Print, CorpusRoundTrip) {
  for (const auto& p : corpus::load("corpus")) {
    auto crate = parse_crate(p.text);
    EXPECT_EQ(reparse(crate), without_spans(crate)) << p.name;
    // after the passes the CFG form still prints as valid input
    run_pipeline(crate, PassConfig{true, true, true, true, true, false, default_panic_functions()});
    EXPECT_EQ(reparse(crate), without_spans(crate)) << p.name << " after the passes";
  }
}

TEST(Print, RandomCratesRoundTrip) {
  for (int i = 0; i < 100; ++i) {
    gen::Rng rng(200 + static_cast<std::uint64_t>(i));
    auto crate = parse_crate(gen::random_crate(rng));
    ASSERT_EQ(reparse(crate), without_spans(crate)) << "seed " << 200 + i;
  }
}

TEST(Print, StatementSpansInsideFunction) {
  for (const auto& p : corpus::load("corpus")) {
    auto crate = parse_crate(p.text);
    for (const auto& f : crate.fun_decls) {
      const auto* body = std::get_if<ullbc::Body>(&f.body);
      if (body == nullptr) continue;
      for (const auto& bb : body->blocks) {
        for (const auto& st : bb.statements) EXPECT_TRUE(within(st.span, f.meta.span)) << p.name << " " << f.meta.name;
        EXPECT_TRUE(within(bb.terminator.span, f.meta.span)) << p.name << " " << f.meta.name;
      }
    }
  }
}

TEST(Constants, ParseAndPrint) {
  auto crate = parse_crate("enum Opt<T> { None, Some(T) }\nstruct P { a: u16, b: bool }");
  auto c = parse_constant(crate, "Opt<u32>::Some(3u32)");
  ASSERT_TRUE(std::holds_alternative<AdtConst>(c.kind));
  EXPECT_EQ(std::get<AdtConst>(c.kind).variant, VariantId(1));
  EXPECT_EQ(print_constant(crate, c), "Opt<u32>::Some(3u32)");
  EXPECT_EQ(print_constant(crate, parse_constant(crate, "P { 7u16, true }")), "P { 7u16, true }");
  EXPECT_EQ(print_constant(crate, parse_constant(crate, "[i8; 2][-1i8, 5i8]")), "[i8; 2][-1i8, 5i8]");
  EXPECT_THROW(parse_constant(crate, "300u8"), ParseError);
  EXPECT_THROW(parse_constant(crate, "1u8 2u8"), ParseError);
}

TEST(Constants, RandomPrintParse) {
  for (int i = 0; i < 200; ++i) {
    gen::Rng rng(300 + static_cast<std::uint64_t>(i));
    auto crate = parse_crate(gen::random_type_decls(rng));
    Ty ty = gen::random_type(rng, crate, 3);
    auto c = gen::random_constant(rng, crate, ty);
    ASSERT_EQ(parse_constant(crate, print_constant(crate, c)), c) << print_constant(crate, c);
  }
}
