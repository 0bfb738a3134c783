// Acceptance gate: one line per criterion, non-zero exit if any fails.

#include <iostream>
#include <random>

#include "support.hpp"

using namespace sdtl;
using namespace sdtl::testing;
using abstract::AVal;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

template <class Fn>
bool criterion(int n, const std::string& title, Fn body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  std::cout << (c.ok ? "PASS" : "FAIL") << "  criterion " << n << ": " << title;
  if (!c.ok) std::cout << " (" << c.detail << ")";
  std::cout << std::endl;
  return c.ok;
}

std::string envKey(const abstract::AState& s) {
  return serialize::toJson(s)["env"].dump() + " " + serialize::toJson(s)["curried"].dump();
}

std::uint32_t callId(const Program& p, const std::string& callee) {
  std::function<std::uint32_t(const nlohmann::json&)> find = [&](const nlohmann::json& n) -> std::uint32_t {
    if (n["kind"] == "Call" && n["children"][0]["name"] == callee) return n["id"];
    for (const auto& c : n["children"]) {
      if (auto r = find(c)) return r;
    }
    return 0;
  };
  return find(AstJson::dump(p));
}

struct Toy {
  using State = int;
  using Value = int;
  static bool esc(int s) { return s == 2; }
};

}  // namespace

int main() {
  int failed = 0;
  auto tally = [&](bool ok) { failed += ok ? 0 : 1; };

  tally(criterion(1, "concrete factorial outputs [2] and [120]", [](Check& c) {
    c.expect(outputOf("fact", {2}) == ints({2}), "input 2");
    c.expect(outputOf("fact", {5}) == ints({120}), "input 5");
  }));

  tally(criterion(2, "fig1 program with inputs [3,4,100] outputs [6,24,45,90,42,42]", [](Check& c) {
    c.expect(outputOf("fig1", {3, 4, 100}) == ints({6, 24, 45, 90, 42, 42}), "output log");
  }));

  tally(criterion(3, "currying outputs [15]; curried chains equal full application", [](Check& c) {
    c.expect(outputOf("currying", {1, 2}) == ints({15}), "output log");
    const std::string decl = "function add(x, y) { return x + y; }\n";
    for (long a = -3; a <= 3; ++a) {
      for (long b = -3; b <= 3; ++b) {
        auto full = concrete::runProgram(parse(decl + "output add(input, input);"), ints({a, b})).output();
        auto chain =
            concrete::runProgram(parse(decl + "g = add(input); output g(input);"), ints({a, b})).output();
        c.expect(full == chain, "chain " + std::to_string(a) + "," + std::to_string(b));
      }
    }
  }));

  tally(criterion(4, "abstract while loop: exactly {sum,z,x:Num} and {sum,z,x:Bool}", [](Check& c) {
    auto r = abstract::analyzeProgram(program("while"));
    c.expect(finalEnvs(r) == std::set<EnvText>{{{"sum", "Num"}, {"z", "Num"}, {"x", "Num"}},
                                               {{"sum", "Num"}, {"z", "Num"}, {"x", "Bool"}}},
             "final environments");
  }));

  tally(criterion(5, "abstract currying loop terminates with the three-row table", [](Check& c) {
    Program p = program("currying_loop");
    auto anchor = callId(p, "foo");
    abstract::AbstractOptions overwrite;
    overwrite.curriedUpdate = abstract::CurriedUpdate::Overwrite;
    auto exact = abstract::analyzeProgram(p, overwrite);
    auto fun = AVal::fun(Sid{1}, 1, Eid{anchor});
    abstract::CurriedKey key{Sid{1}, 1, Eid{anchor}};
    std::set<std::string> expected;
    for (int row = 0; row < 3; ++row) {
      abstract::AState s;
      s.env = {{"foo", AVal::fun(Sid{1})}, {"x", row == 0 ? AVal::num() : fun}};
      if (row == 1) s.curried[key] = {{AVal::num()}};
      if (row == 2) s.curried[key] = {{fun}};
      expected.insert(envKey(s));
    }
    std::set<std::string> got;
    for (const auto& s : exact.finals) got.insert(envKey(s));
    c.expect(got == expected, "overwrite-mode table");

    auto accumulated = abstract::analyzeProgram(p);
    c.expect(accumulated.finals.size() == 3, "accumulate mode has three rows");
    c.expect(accumulated.stats.longestLoop < 10, "loop converges in a few rounds");
  }));

  tally(criterion(6, "abstract objects example matches the single-row table", [](Check& c) {
    Program p = program("objects");
    auto ast = AstJson::dump(p);
    std::uint32_t site = 0;
    std::function<void(const nlohmann::json&)> find = [&](const nlohmann::json& n) {
      if (n["kind"] == "New") site = n["id"];
      for (const auto& k : n["children"]) find(k);
    };
    find(ast);
    Sid juiceMe = functionSid(p, "juiceMe");
    auto anchor = callId(p, "juiceMe");
    abstract::AState expected;
    expected.env = {{"Fruit", AVal::fun(functionSid(p, "Fruit"))},
                    {"juicible", AVal::fun(functionSid(p, "juicible"))},
                    {"apple", AVal::obj(site)}};
    auto juice = AVal::fun(juiceMe, 1, Eid{anchor});
    expected.objMem[site] = {{"value", AVal::num()}, {"juice", juice}};
    expected.curried[{juiceMe, 1, Eid{anchor}}] = {{AVal::num()}};
    auto r = abstract::analyzeProgram(p);
    c.expect(r.finals == std::set<abstract::AState>{expected}, "final state");
  }));

  tally(criterion(7, "abstract exceptions: {x,j} and {x,e}, both with ex = Void", [](Check& c) {
    auto r = abstract::analyzeProgram(program("exceptions"));
    c.expect(finalEnvs(r) == std::set<EnvText>{{{"x", "Num"}, {"j", "Num"}}, {{"x", "Num"}, {"e", "Num"}}},
             "final environments");
    for (const auto& s : r.finals) c.expect(!s.ex && !s.ret, "void slots");
  }));

  tally(criterion(8, "concrete exception control flow outputs [50,-1,0]", [](Check& c) {
    c.expect(outputOf("tryorerror", {}) == ints({50, -1, 0}), "output log");
  }));

  tally(criterion(9, "property suite: monotonicity, escape, monad laws, engine, ids", [](Check& c) {
    using K = kernel::Monad<Toy>;
    using Out = kernel::Outcome<int, int>;
    kernel::FunctionTable<Toy> table(nullptr, nullptr, nullptr, nullptr);
    std::mt19937_64 rng(2024);
    auto randomOut = [&](bool escapes) {
      Out o;
      for (int s = 0; s < 3; ++s) {
        if (s == 2 && !escapes) continue;
        for (int p = -1; p < 2; ++p) {
          if ((p < 0 && !escapes) || rng() % 2) continue;
          o.emplace(s, p < 0 ? kernel::Payload<int>{} : kernel::Payload<int>{p});
        }
      }
      return o;
    };
    using Rows = std::array<Out, 3>;
    auto fn = [](Rows r) {
      return kernel::Transformer<Toy, int>([r](const auto&, const int& s) { return r[static_cast<std::size_t>(s)]; });
    };
    auto rows = [&](bool escapes) { return Rows{randomOut(escapes), randomOut(escapes), randomOut(escapes)}; };
    auto grow = [&](Rows r) {
      for (auto& o : r) o.merge(randomOut(true));
      return r;
    };
    int cases = 0;
    for (int k = 0; k < 1200; ++k) {
      Rows t = rows(true), k0 = rows(true), k1 = rows(true);
      Rows t2 = grow(t), k02 = grow(k0), k12 = grow(k1);
      auto small = K::bind(fn(t), [&](const int& a) { return fn(a ? k1 : k0); });
      auto large = K::bind(fn(t2), [&](const int& a) { return fn(a ? k12 : k02); });
      for (int s = 0; s < 3; ++s) {
        auto a = small(table, s), b = large(table, s);
        c.expect(std::includes(b.begin(), b.end(), a.begin(), a.end()), "bind monotonicity");
        for (const auto& [s1, p] : t[static_cast<std::size_t>(s)]) {
          if (Toy::esc(s1)) c.expect(a.count({s1, std::nullopt}) == 1, "escape short-circuit");
        }
        ++cases;
      }
      Rows pureFlow = rows(false);
      auto right = K::bind(fn(pureFlow), [](const int& a) { return K::pure(a); });
      auto assocL = K::bind(K::bind(fn(pureFlow), [&](const int& a) { return fn(a ? k1 : k0); }),
                            [&](const int& a) { return fn(a ? k0 : k1); });
      auto assocR = K::bind(fn(pureFlow), [&](const int& a) {
        return K::bind(fn(a ? k1 : k0), [&](const int& b) { return fn(b ? k0 : k1); });
      });
      for (int s = 0; s < 2; ++s) {
        c.expect(right(table, s) == fn(pureFlow)(table, s), "right identity");
        c.expect(K::bind(K::pure(1), [&](const int& a) { return fn(a ? k1 : k0); })(table, s) == fn(k1)(table, s),
                 "left identity");
        c.expect(assocL(table, s) == assocR(table, s), "associativity");
      }
    }
    c.expect(cases >= 1000, "at least 1000 monotonicity cases");

    std::vector<std::string> sources;
    for (const auto& name : corpus()) sources.push_back(programText(name));
    for (const auto& src : gen::generatePrograms(77, 100, 10)) sources.push_back(src);
    for (const auto& src : sources) {
      Program p = parse(src);
      auto all = ids(p);
      c.expect(std::set<std::uint32_t>(all.begin(), all.end()).size() == all.size(), "id uniqueness");
      std::map<std::pair<int, std::size_t>, std::size_t> last;
      abstract::analyzeProgram(p, {}, [&](const abstract::EngineEvent& e) {
        auto key = std::pair{static_cast<int>(e.kind), e.instance};
        auto it = last.find(key);
        if (it != last.end()) c.expect(e.size >= it->second, "monotone accumulation");
        last[key] = e.size;
      });
    }
    std::string loop = "while (z > 0) { sum = sum + z; z = z - 1; x = true; }\n";
    std::string base = "sum = 0; z = input; x = 50;\n" + loop;
    c.expect(finalEnvs(abstract::analyzeProgram(parse(base))) ==
                 finalEnvs(abstract::analyzeProgram(parse(base + loop))),
             "loop idempotence");
  }));

  tally(criterion(10, "soundness: corpus and 200 generated programs, no violations beyond the caveat", [](Check& c) {
    soundness::HarnessOptions options;
    options.perStatement = true;
    auto vectors = gen::inputVectors(10, 4);
    std::size_t checked = 0, caveats = 0;
    for (const auto& name : corpus()) {
      if (name == "currying_loop") {
        auto r = abstract::analyzeProgram(program(name));
        c.expect(!r.finals.empty(), "currying loop analysis terminates");
        continue;
      }
      auto in = vectors;
      if (name == "fig1") in = {ints({3, 4, 100}), ints({3, 4, 10}), ints({1, 2, 43}), ints({0, 0, 0})};
      auto r = soundness::differentialTest(program(name), in, options, name);
      checked += r.checked;
      caveats += r.caveats();
      c.expect(r.sound(), "violation in " + name);
    }
    auto programs = gen::generatePrograms(1, 200, 10);
    for (std::size_t k = 0; k < programs.size(); ++k) {
      auto r = soundness::differentialTest(parse(programs[k]), vectors, options);
      checked += r.checked;
      caveats += r.caveats();
      if (!r.sound()) {
        auto small = gen::shrink(programs[k], [&](const std::string& s) {
          return !soundness::differentialTest(std::string_view(s), vectors, options).sound();
        });
        c.expect(false, "violation in generated program:\n" + small);
      }
    }
    c.expect(checked >= 200 * 4, "enough concrete runs checked");
    std::cout << "      checked " << checked << " runs, " << caveats
              << " allocation-site caveats reported" << std::endl;
  }));

  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
