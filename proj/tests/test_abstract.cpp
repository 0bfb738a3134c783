#include <gtest/gtest.h>

#include "support.hpp"

using namespace sdtl;
using namespace sdtl::testing;
using abstract::AVal;
using nlohmann::json;

namespace {

abstract::AnalysisResult analyze(const std::string& src, abstract::AbstractOptions options = {}) {
  return abstract::analyzeProgram(parse(src), options);
}

/// (environment, curried table) of every final state, as JSON text.
std::set<std::pair<std::string, std::string>> envAndCurried(const abstract::AnalysisResult& r) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& s : r.finals) {
    auto j = serialize::toJson(s);
    out.emplace(j["env"].dump(), j["curried"].dump());
  }
  return out;
}

std::uint32_t firstPartialApplication(const Program& p, const std::string& callee) {
  std::function<std::optional<std::uint32_t>(const json&)> find =
      [&](const json& n) -> std::optional<std::uint32_t> {
    if (n["kind"] == "Call" && n["children"][0]["name"] == callee) return n["id"].get<std::uint32_t>();
    for (const auto& c : n["children"]) {
      if (auto r = find(c)) return r;
    }
    return std::nullopt;
  };
  return find(AstJson::dump(p)).value();
}

}  // namespace

TEST(Abstract, Factorial) {
  auto r = abstract::analyzeProgram(program("fact"));
  EXPECT_EQ(finalEnvs(r), (std::set<EnvText>{{{"fact", "<1,0,0>"}, {"z", "Num"}}}));
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Abstract, FactorialSummaryReachesFixedPoint) {
  std::vector<abstract::EngineEvent> calls;
  abstract::analyzeProgram(program("fact"), {}, [&](const abstract::EngineEvent& e) {
    if (e.kind == abstract::EngineEvent::Kind::Call) calls.push_back(e);
  });
  ASSERT_FALSE(calls.empty());
  // The recursive call is first read as the empty approximation, then as {Num}.
  auto last = calls.back();
  EXPECT_EQ(last.node, 1u);
  EXPECT_EQ(last.size, 1u);
  EXPECT_GE(last.iteration, 2u);
}

TEST(Abstract, WhileLoop) {
  auto r = abstract::analyzeProgram(program("while"));
  EXPECT_EQ(finalEnvs(r), (std::set<EnvText>{{{"sum", "Num"}, {"z", "Num"}, {"x", "Num"}},
                                             {{"sum", "Num"}, {"z", "Num"}, {"x", "Bool"}}}));
}

TEST(Abstract, CurryingLoopTerminatesWithAccumulatedTable) {
  Program p = program("currying_loop");
  auto a = firstPartialApplication(p, "foo");
  std::string fun = json({{"fun", {1, 1, a}}}).dump();
  auto r = abstract::analyzeProgram(p);
  EXPECT_EQ(envAndCurried(r),
            (std::set<std::pair<std::string, std::string>>{
                {R"({"foo":{"fun":[1,0,0]},"x":"Num"})", "[]"},
                {R"({"foo":{"fun":[1,0,0]},"x":)" + fun + "}",
                 R"([{"key":[1,1,)" + std::to_string(a) + R"(],"lists":[["Num"]]}])"},
                {R"({"foo":{"fun":[1,0,0]},"x":)" + fun + "}",
                 R"([{"key":[1,1,)" + std::to_string(a) + R"(],"lists":[["Num"],[)" + fun + "]]}]"},
            }));
}

TEST(Abstract, CurryingLoopOverwriteMatchesTable) {
  Program p = program("currying_loop");
  auto a = firstPartialApplication(p, "foo");
  std::string fun = json({{"fun", {1, 1, a}}}).dump();
  abstract::AbstractOptions options;
  options.curriedUpdate = abstract::CurriedUpdate::Overwrite;
  auto r = abstract::analyzeProgram(p, options);
  std::string key = R"([{"key":[1,1,)" + std::to_string(a) + R"(],"lists":)";
  EXPECT_EQ(envAndCurried(r), (std::set<std::pair<std::string, std::string>>{
                                  {R"({"foo":{"fun":[1,0,0]},"x":"Num"})", "[]"},
                                  {R"({"foo":{"fun":[1,0,0]},"x":)" + fun + "}", key + R"([["Num"]]}])"},
                                  {R"({"foo":{"fun":[1,0,0]},"x":)" + fun + "}", key + "[[" + fun + "]]}]"},
                              }));
}

TEST(Abstract, ObjectsExample) {
  Program p = program("objects");
  Sid fruit = functionSid(p, "Fruit");
  Sid juicible = functionSid(p, "juicible");
  Sid juiceMe = functionSid(p, "juiceMe");
  auto anchor = firstPartialApplication(p, "juiceMe");
  std::uint32_t site = 0;
  std::function<void(const json&)> find = [&](const json& n) {
    if (n["kind"] == "New") site = n["id"];
    for (const auto& c : n["children"]) find(c);
  };
  find(AstJson::dump(p));
  ASSERT_NE(site, 0u);

  auto r = abstract::analyzeProgram(p);
  ASSERT_EQ(r.finals.size(), 1u);
  const auto& s = *r.finals.begin();
  EXPECT_EQ(s.env.at("Fruit"), AVal::fun(fruit));
  EXPECT_EQ(s.env.at("juicible"), AVal::fun(juicible));
  EXPECT_EQ(s.env.at("apple"), AVal::obj(site));
  EXPECT_EQ(s.env.size(), 3u);
  auto juice = AVal::fun(juiceMe, 1, Eid{anchor});
  EXPECT_EQ(s.objMem.at(site), (abstract::AEnv{{"value", AVal::num()}, {"juice", juice}}));
  EXPECT_EQ(s.curried.at({juiceMe, 1, Eid{anchor}}), (std::set<std::vector<AVal>>{{AVal::num()}}));
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Abstract, SideEffectingRecursion) {
  auto r = abstract::analyzeProgram(program("fact_side_effect"));
  ASSERT_EQ(r.finals.size(), 2u);
  std::set<abstract::AEnv> globals;
  for (const auto& s : r.finals) globals.insert(s.objMem.at(0));
  EXPECT_EQ(globals, (std::set<abstract::AEnv>{{}, {{"x", AVal::num()}}}));
}

TEST(Abstract, ExceptionsExample) {
  auto r = abstract::analyzeProgram(program("exceptions"));
  EXPECT_EQ(finalEnvs(r), (std::set<EnvText>{{{"x", "Num"}, {"j", "Num"}}, {{"x", "Num"}, {"e", "Num"}}}));
  for (const auto& s : r.finals) EXPECT_FALSE(s.ex.has_value());
}

TEST(Abstract, TryOrError) {
  auto r = abstract::analyzeProgram(program("tryorerror"));
  EXPECT_FALSE(r.finals.empty());
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Abstract, Fig1HasNoDiagnostics) {
  auto r = abstract::analyzeProgram(program("fig1"));
  EXPECT_EQ(r.finals.size(), 2u);
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Abstract, CyclicHeap) {
  auto r = abstract::analyzeProgram(program("cycle"));
  ASSERT_EQ(r.finals.size(), 1u);
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Abstract, TypeErrorsBecomeDiagnostics) {
  for (const char* src : {"if (1) { x = 1; }", "output y;", "x = 1 + true;", "x = 1; x(2);",
                          "x = 1; x.f = 2;", "o = global; output o.missing;",
                          "function f(a) { return a; }\nx = f(1, 2);",
                          "function f(a) { a = 1; }\nx = f(1) + 1;"}) {
    auto r = analyze(src);
    EXPECT_FALSE(r.diagnostics.empty()) << src;
    EXPECT_TRUE(r.finals.empty()) << src;
  }
}

TEST(Abstract, DiagnosticsKeepOtherBranches) {
  auto r = analyze("x = input; if (x > 0) { y = 1; } else { y = true; }\nz = y + 1;");
  EXPECT_EQ(r.finals.size(), 1u);
  EXPECT_EQ(r.diagnostics.size(), 1u);
}

TEST(Abstract, DivisionByZeroIsNotATypeError) {
  auto r = abstract::analyzeProgram(program("div0"));
  EXPECT_EQ(r.finals.size(), 1u);
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Abstract, AllocationSiteSharedInLoop) {
  auto r = analyze("function F() { this.a = 1; }\nwhile (input > 0) { x = new F(); }");
  std::set<AVal> xs;
  for (const auto& s : r.finals) {
    if (s.env.count("x")) xs.insert(s.env.at("x"));
  }
  EXPECT_EQ(xs.size(), 1u);
}

TEST(Abstract, IterationCapRaises) {
  abstract::AbstractOptions options;
  options.maxIterations = 1;
  EXPECT_THROW(abstract::analyzeProgram(program("while"), options), AnalysisError);
}

TEST(Abstract, Deterministic) {
  for (const auto& name : corpus()) {
    auto a = abstract::analyzeProgram(program(name));
    auto b = abstract::analyzeProgram(program(name));
    EXPECT_EQ(serialize::statesJson(a.finals), serialize::statesJson(b.finals)) << name;
  }
}

// Engine properties.

TEST(Engine, MonotoneAccumulation) {
  std::vector<std::string> sources;
  for (const auto& name : corpus()) sources.push_back(programText(name));
  for (const auto& src : gen::generatePrograms(21, 60, 10)) sources.push_back(src);
  for (const auto& src : sources) {
    std::map<std::tuple<int, std::size_t>, std::pair<std::size_t, std::size_t>> last;
    abstract::analyzeProgram(parse(src), {}, [&](const abstract::EngineEvent& e) {
      auto key = std::tuple{static_cast<int>(e.kind), e.instance};
      auto it = last.find(key);
      if (it != last.end()) {
        EXPECT_GE(e.size, it->second.second) << src;
        if (e.kind == abstract::EngineEvent::Kind::Loop) EXPECT_EQ(e.iteration, it->second.first + 1);
      }
      last[key] = {e.iteration, e.size};
    });
  }
}

TEST(Engine, RepeatingALoopAddsNothing) {
  // At a loop fixed point, running the same loop again cannot reach new states.
  const std::vector<std::string> loops = {
      "while (z > 0) { sum = sum + z; z = z - 1; x = true; }",
      "while (z > 0) { z = z - 1; x = x; }",
  };
  for (const auto& loop : loops) {
    std::string base = "sum = 0; z = input; x = 50;\n" + loop + "\n";
    auto once = analyze(base);
    auto twice = analyze(base + loop + "\n");
    EXPECT_EQ(finalEnvs(once), finalEnvs(twice)) << loop;
  }
}

TEST(Engine, RepeatingACallAddsNothing) {
  std::string base = programText("fact_side_effect");
  auto once = abstract::analyzeProgram(parse(base));
  auto twice = abstract::analyzeProgram(parse(base + "z = fact(fact, input);\n"));
  EXPECT_EQ(serialize::statesJson(once.finals), serialize::statesJson(twice.finals));
}

TEST(Engine, SummariesAreFixedPoints) {
  // Re-evaluating every completed summary body from its entry state yields
  // nothing outside the summary.
  for (const char* name : {"fact", "fact_side_effect", "fig1", "tryorerror", "objects"}) {
    Program p = program(name);
    abstract::AbstractInterp interp;
    kernel::Semantics<abstract::AbstractInterp> sem(p, interp);
    kernel::Tracker<abstract::AState> tracker;
    auto table = sem.table(&tracker);
    kernel::Monad<abstract::AbstractInterp>::states(sem.stm(p.root())(table, abstract::AState::initial()));
    auto summaries = interp.summaries();
    ASSERT_FALSE(summaries.empty()) << name;
    for (const auto& [key, exits] : summaries) {
      auto again = kernel::Monad<abstract::AbstractInterp>::states(sem.body(key.first)(table, key.second));
      for (const auto& s : again) EXPECT_TRUE(exits.count(s)) << name;
    }
  }
}

TEST(Engine, StatsRecorded) {
  auto r = abstract::analyzeProgram(program("fig1"));
  EXPECT_GT(r.stats.callIterations, 0u);
  EXPECT_GT(r.stats.summaries, 0u);
}
