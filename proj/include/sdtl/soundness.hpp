#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sdtl/abstract.hpp"
#include "sdtl/concrete.hpp"
#include "sdtl/parser.hpp"
#include "sdtl/serialize.hpp"

// The abstraction relation between abstract and concrete states, and the
// differential harness that checks concrete runs against the analysis.

namespace sdtl::soundness {

using abstract::AState;
using abstract::AVal;
using concrete::CState;
using concrete::CValue;

/// The relation eta ≻ rho for one pair of states. Object comparisons are
/// coinductive: a pair of objects under comparison is assumed related, so
/// cyclic heaps terminate.
class Relation {
 public:
  Relation(const AState& eta, const CState& rho) : eta_(eta), rho_(rho) {}

  bool value(const AVal& a, const CValue& c) {
    if (a.isNum()) return c.isInt();
    if (a.isBool()) return c.isBool();
    if (a.isVoid()) return c.isVoid();
    if (a.isObj()) return c.isObj() && object(a.obj().site, c.obj().id);
    if (!c.isFun()) return false;
    const auto& af = a.fun();
    const auto& cf = c.fun();
    if (af.sid != cf.sid || af.count != cf.curried.size()) return false;
    if (af.count == 0) return true;
    auto it = eta_.curried.find(abstract::CurriedKey{af.sid, af.count, af.anchor});
    if (it == eta_.curried.end()) return false;
    for (const auto& list : it->second) {
      bool all = true;
      for (std::size_t k = 0; all && k < list.size(); ++k) all = value(list[k], cf.curried[k]);
      if (all) return true;
    }
    return false;
  }

  /// alpha(n) ≻ Omega(m): every member of the concrete object is abstracted
  /// by the same member of the abstract one.
  bool object(std::uint32_t n, std::uint64_t m) {
    auto a = eta_.objMem.find(n);
    auto c = rho_.objMem.find(m);
    if (a == eta_.objMem.end() || c == rho_.objMem.end()) return false;
    if (assumed_.count({n, m})) return true;
    assumed_.insert({n, m});
    bool ok = env(a->second, c->second.members, nullptr);
    assumed_.erase({n, m});
    return ok;
  }

  bool env(const abstract::AEnv& sigma, const concrete::Env& v, std::vector<std::string>* why) {
    for (const auto& [id, cv] : v) {
      auto it = sigma.find(id);
      if (it == sigma.end()) {
        if (why) why->push_back("no abstract binding for " + id);
        return false;
      }
      if (!value(it->second, cv)) {
        if (why) {
          why->push_back(id + ": " + serialize::toText(it->second) + " does not abstract " +
                         serialize::toText(cv));
        }
        return false;
      }
    }
    return true;
  }

  /// eta ≻ rho. When `why` is given, the first failing component is recorded.
  bool state(std::vector<std::string>* why = nullptr) {
    if (!env(eta_.env, rho_.env, why)) return false;
    for (const auto& [m, obj] : rho_.objMem) {
      bool found = false;
      for (const auto& [n, members] : eta_.objMem) {
        if (object(n, m)) {
          found = true;
          break;
        }
      }
      if (!found) {
        if (why) why->push_back("concrete object " + std::to_string(m) + " has no abstraction");
        return false;
      }
    }
    if (!object(eta_.self, rho_.self)) {
      if (why) why->push_back("this: object " + std::to_string(eta_.self) +
                              " does not abstract object " + std::to_string(rho_.self));
      return false;
    }
    if (!slot(eta_.ret, rho_.ret)) {
      if (why) why->push_back("return slot differs");
      return false;
    }
    if (!slot(eta_.ex, rho_.ex)) {
      if (why) why->push_back("exception slot differs");
      return false;
    }
    return true;
  }

 private:
  bool slot(const std::optional<AVal>& a, const std::optional<CValue>& c) {
    if (!a || !c) return !a && !c;
    return value(*a, *c);
  }

  const AState& eta_;
  const CState& rho_;
  std::set<std::pair<std::uint32_t, std::uint64_t>> assumed_;
};

/// The canonical abstraction of a concrete state: every value replaced by its
/// type, each concrete object by an abstract object with the same number,
/// and curried prefixes collected under anchor 0.
inline AState typeErase(const CState& rho) {
  AState eta;
  std::function<AVal(const CValue&)> erase = [&](const CValue& c) -> AVal {
    if (c.isInt()) return AVal::num();
    if (c.isBool()) return AVal::boolean();
    if (c.isVoid()) return abstract::VoidVal{};
    if (c.isObj()) return AVal::obj(static_cast<std::uint32_t>(c.obj().id));
    const auto& f = c.fun();
    auto count = static_cast<std::uint32_t>(f.curried.size());
    if (count > 0) {
      std::vector<AVal> list;
      for (const auto& p : f.curried) list.push_back(erase(p));
      eta.curried[abstract::CurriedKey{f.sid, count, Eid{}}].insert(std::move(list));
    }
    return AVal::fun(f.sid, count);
  };
  auto env = [&](const concrete::Env& v) {
    abstract::AEnv sigma;
    for (const auto& [id, c] : v) sigma[id] = erase(c);
    return sigma;
  };
  eta.env = env(rho.env);
  eta.objMem.clear();
  for (const auto& [m, obj] : rho.objMem) eta.objMem[static_cast<std::uint32_t>(m)] = env(obj.members);
  eta.self = static_cast<std::uint32_t>(rho.self);
  if (rho.ret) eta.ret = erase(*rho.ret);
  if (rho.ex) eta.ex = erase(*rho.ex);
  return eta;
}

inline bool abstractsValue(const AState& eta, const CState& rho, const AVal& a, const CValue& c) {
  return Relation(eta, rho).value(a, c);
}

inline bool abstractsState(const AState& eta, const CState& rho,
                           std::vector<std::string>* why = nullptr) {
  return Relation(eta, rho).state(why);
}

struct Witness {
  CState concrete;
  /// One explanation per abstract candidate, in candidate order.
  std::vector<std::string> explanations;
};

struct Judgment {
  bool holds = true;
  std::vector<Witness> failures;
};

/// The powerset relation: every concrete state is abstracted by some
/// abstract state.
inline Judgment abstractsOutcome(const std::set<AState>& p, const std::set<CState>& q) {
  Judgment j;
  for (const CState& rho : q) {
    Witness w{rho, {}};
    bool found = false;
    std::size_t k = 0;
    for (const AState& eta : p) {
      std::vector<std::string> why;
      if (abstractsState(eta, rho, &why)) {
        found = true;
        break;
      }
      w.explanations.push_back("candidate " + std::to_string(k++) + ": " +
                               (why.empty() ? std::string("fails") : why.front()));
    }
    if (!found) {
      if (p.empty()) w.explanations.push_back("no abstract states");
      j.holds = false;
      j.failures.push_back(std::move(w));
    }
  }
  return j;
}

/// Whether two live concrete objects share an allocation site: the situation
/// in which the abstract allocation-site reset may lose information.
inline bool sharesAllocationSite(const CState& rho) {
  std::set<Eid> seen;
  for (const auto& [id, obj] : rho.objMem) {
    if (raw(obj.site) == 0) continue;
    if (!seen.insert(obj.site).second) return true;
  }
  return false;
}

inline const char* kAllocationSiteNote =
    "two concrete objects share an allocation site; the abstract object is reset on each "
    "allocation (known limitation: allocation-site reset)";

struct Violation {
  std::vector<Integer> inputs;
  /// "final", or "before statement <sid>" for the per-statement check.
  std::string stage;
  CState concrete;
  std::vector<std::string> explanations;
  bool caveat = false;
};

struct Skipped {
  std::vector<Integer> inputs;
  std::string reason;
};

struct Report {
  std::string program;
  std::size_t checked = 0;
  std::vector<Violation> violations;
  std::vector<Skipped> skipped;
  std::set<abstract::Diagnostic> diagnostics;

  std::size_t hardViolations() const {
    std::size_t n = 0;
    for (const auto& v : violations) n += v.caveat ? 0 : 1;
    return n;
  }
  std::size_t caveats() const { return violations.size() - hardViolations(); }
  bool sound() const { return hardViolations() == 0; }
};

struct HarnessOptions {
  concrete::ConcreteOptions concrete;
  abstract::AbstractOptions abstract;
  /// Also compare the states reaching every top-level statement.
  bool perStatement = false;
};

/// Differential test of one parsed program against a list of input vectors.
inline Report differentialTest(const Program& program,
                               const std::vector<std::vector<Integer>>& inputVectors,
                               const HarnessOptions& options = {}, std::string name = {}) {
  Report report;
  report.program = std::move(name);

  std::set<Sid> topLevel;
  for (const Stm* s : topLevelStatements(program.root())) topLevel.insert(s->sid);

  std::map<Sid, std::set<AState>> abstractAt;
  abstract::StatementObserver onStatement;
  if (options.perStatement) {
    onStatement = [&](Sid n, const AState& s) {
      if (topLevel.count(n)) abstractAt[n].insert(s);
    };
  }
  auto analysis = abstract::analyzeProgram(program, options.abstract, {}, onStatement);
  report.diagnostics = analysis.diagnostics;

  for (const auto& inputs : inputVectors) {
    std::vector<std::pair<Sid, CState>> concreteAt;
    concrete::StatementObserver observe;
    if (options.perStatement) {
      observe = [&](Sid n, const CState& s) {
        if (topLevel.count(n)) concreteAt.emplace_back(n, s);
      };
    }
    concrete::RunResult run;
    try {
      run = concrete::runProgram(program, inputs, options.concrete, observe);
    } catch (const BudgetExceeded& e) {
      report.skipped.push_back({inputs, "budget: " + e.describe()});
      continue;
    } catch (const RuntimeError& e) {
      report.skipped.push_back({inputs, "run-time error: " + e.describe()});
      continue;
    }
    ++report.checked;

    auto check = [&](const std::set<AState>& p, const CState& rho, std::string stage) {
      auto j = abstractsOutcome(p, {rho});
      for (auto& w : j.failures) {
        bool caveat = sharesAllocationSite(w.concrete);
        if (caveat) w.explanations.push_back(kAllocationSiteNote);
        report.violations.push_back(
            {inputs, stage, std::move(w.concrete), std::move(w.explanations), caveat});
      }
    };
    for (const auto& [n, rho] : concreteAt) {
      check(abstractAt[n], rho, "before statement " + std::to_string(raw(n)));
    }
    check(analysis.finals, run.state, "final");
  }
  return report;
}

inline Report differentialTest(std::string_view source,
                               const std::vector<std::vector<Integer>>& inputVectors,
                               const HarnessOptions& options = {}, std::string name = {}) {
  Program p = parse(source);
  return differentialTest(p, inputVectors, options, std::move(name));
}

inline nlohmann::json toJson(const Report& r) {
  using nlohmann::json;
  auto ints = [](const std::vector<Integer>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(serialize::integer(x));
    return a;
  };
  json violations = json::array();
  json caveats = json::array();
  for (const auto& v : r.violations) {
    json item = {{"inputs", ints(v.inputs)},
                 {"stage", v.stage},
                 {"concreteState", serialize::toJson(v.concrete)},
                 {"explanations", v.explanations}};
    (v.caveat ? caveats : violations).push_back(item);
  }
  json skipped = json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"inputs", ints(s.inputs)}, {"reason", s.reason}});
  return {{"program", r.program}, {"checked", r.checked}, {"violations", violations},
          {"caveats", caveats},   {"skipped", skipped}};
}

}  // namespace sdtl::soundness
