#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "support.hpp"

using namespace sdtl;
using namespace sdtl::testing;

TEST(Parse, SmallestProgramIds) {
  auto j = AstJson::dump(parse("x = 1;"));
  EXPECT_EQ(j["kind"], "Assign");
  EXPECT_EQ(j["id"], 1);
  EXPECT_EQ(j["children"][0]["id"], 2);
  EXPECT_EQ(j["children"][0]["kind"], "Var");
  EXPECT_EQ(j["children"][1]["id"], 3);
  EXPECT_EQ(j["children"][1]["kind"], "Con");
}

TEST(Parse, FactorialDeclaration) {
  Program p = program("fact");
  Sid fact = functionSid(p, "fact");
  EXPECT_EQ(raw(fact), 1u);
  EXPECT_EQ(p.arity(fact), 2u);
  EXPECT_EQ(p.param(fact), (std::vector<Ident>{"f", "n"}));
}

TEST(Parse, Fig1Juicer) {
  Program p = program("fig1");
  Sid juiceMe = functionSid(p, "juiceMe");
  EXPECT_EQ(p.param(juiceMe), (std::vector<Ident>{"j", "x"}));
  EXPECT_EQ(p.functions().size(), 4u);
}

TEST(Parse, EmptyParameterList) {
  Program p = parse("function g(){}");
  EXPECT_EQ(p.arity(functionSid(p, "g")), 0u);
}

TEST(Parse, DuplicateParameter) {
  EXPECT_THROW(parse("function f(a,a){}"), SyntaxError);
}

TEST(Parse, SyntaxErrorPosition) {
  try {
    parse("x = 1;\ny = ;");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 5);
  }
}

TEST(Parse, RejectsMalformed) {
  for (const char* src : {"x = (1;", "if x { }", "function (a) {}", "try { } catch { }",
                          "x = 1 +;", "output;", "new 3();", "x.1 = 2;", "x = @;"}) {
    EXPECT_THROW(parse(src), SyntaxError) << src;
  }
}

TEST(Parse, CommentsAndOptionalSemicolons) {
  Program p = parse("# leading\nx = 1; # trailing\nif (x > 0) { output x; }\noutput 2");
  EXPECT_EQ(topLevelStatements(p.root()).size(), 3u);
}

TEST(Parse, UnaryMinusIsSubtraction) {
  auto out = concrete::runProgram(parse("output -3 * 2; output 1 - -1;"), {}).output();
  EXPECT_EQ(out, ints({-6, 2}));
}

TEST(Parse, NewThroughMember) {
  Program p = parse("function C(v) { this.v = v; }\nglobal.C = C;\no = new global.C(4);\noutput o.v;");
  EXPECT_EQ(concrete::runProgram(p, {}).output(), ints({4}));
}

TEST(Parse, IdsUniqueOnCorpus) {
  for (const auto& name : corpus()) {
    Program p = program(name);
    auto all = ids(p);
    std::set<std::uint32_t> unique(all.begin(), all.end());
    EXPECT_EQ(unique.size(), all.size()) << name;
    EXPECT_EQ(*std::min_element(all.begin(), all.end()), 1u) << name;
    EXPECT_EQ(*std::max_element(all.begin(), all.end()), p.nodeCount()) << name;
  }
}

TEST(Parse, IdsStableAcrossReparse) {
  for (const auto& name : corpus()) {
    EXPECT_EQ(AstJson::dump(program(name)), AstJson::dump(program(name))) << name;
  }
}

TEST(Parse, IdsUniqueOnGeneratedPrograms) {
  for (const auto& src : gen::generatePrograms(11, 100, 10)) {
    auto all = ids(parse(src));
    std::set<std::uint32_t> unique(all.begin(), all.end());
    ASSERT_EQ(unique.size(), all.size()) << src;
  }
}

TEST(Printer, RoundTripIsStable) {
  std::vector<std::string> sources;
  for (const auto& name : corpus()) sources.push_back(programText(name));
  for (const auto& src : gen::generatePrograms(5, 100, 10)) sources.push_back(src);
  for (const auto& src : sources) {
    std::string once = print(parse(src));
    EXPECT_EQ(print(parse(once)), once) << src;
  }
}

TEST(Printer, PreservesMeaning) {
  for (const char* name : {"fig1", "tryorerror", "currying"}) {
    Program original = program(name);
    Program reprinted = parse(print(original));
    auto in = ints({3, 4, 100});
    EXPECT_EQ(concrete::runProgram(original, in).output(), concrete::runProgram(reprinted, in).output())
        << name;
  }
}

TEST(Printer, OmitPrintsNil) {
  Program p = parse("x = 1;\noutput x;");
  auto top = topLevelStatements(p.root());
  EXPECT_EQ(Printer({top[1]->sid}).print(p), "x = 1;\nnil\n");
}

TEST(AstJson, FunctionCarriesNameAndParams) {
  auto j = AstJson::dump(parse("function add(x, y) { return x + y; }"));
  EXPECT_EQ(j["kind"], "FunDecl");
  EXPECT_EQ(j["name"], "add");
  EXPECT_EQ(j["params"], nlohmann::json({"x", "y"}));
}
