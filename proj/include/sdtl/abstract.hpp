#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdtl/ast.hpp"
#include "sdtl/errors.hpp"
#include "sdtl/kernel.hpp"
#include "sdtl/record.hpp"

namespace sdtl::abstract {

struct TNum {
  friend auto operator<=>(const TNum&, const TNum&) = default;
};
struct TBool {
  friend auto operator<=>(const TBool&, const TBool&) = default;
};
/// An abstract object: 0 for the global object, otherwise the Eid of the
/// `new` expression that allocated it.
struct AObjRef {
  std::uint32_t site = 0;
  friend auto operator<=>(const AObjRef&, const AObjRef&) = default;
};
/// Function pointer (sid, number of curried arguments, anchor eid). The anchor
/// is the partial application that produced it, or 0 when nothing is curried.
struct AFunPtr {
  Sid sid{};
  std::uint32_t count = 0;
  Eid anchor{};
  friend auto operator<=>(const AFunPtr&, const AFunPtr&) = default;
};
struct VoidVal {
  friend auto operator<=>(const VoidVal&, const VoidVal&) = default;
};

struct AVal {
  std::variant<TNum, TBool, AObjRef, AFunPtr, VoidVal> v;

  AVal() : v(VoidVal{}) {}
  AVal(TNum x) : v(x) {}
  AVal(TBool x) : v(x) {}
  AVal(AObjRef x) : v(x) {}
  AVal(AFunPtr x) : v(x) {}
  AVal(VoidVal x) : v(x) {}

  static AVal num() { return TNum{}; }
  static AVal boolean() { return TBool{}; }
  static AVal obj(std::uint32_t site) { return AObjRef{site}; }
  static AVal fun(Sid sid, std::uint32_t count = 0, Eid anchor = Eid{}) {
    return AFunPtr{sid, count, anchor};
  }

  bool isNum() const { return std::holds_alternative<TNum>(v); }
  bool isBool() const { return std::holds_alternative<TBool>(v); }
  bool isObj() const { return std::holds_alternative<AObjRef>(v); }
  bool isFun() const { return std::holds_alternative<AFunPtr>(v); }
  bool isVoid() const { return std::holds_alternative<VoidVal>(v); }

  AObjRef obj() const { return std::get<AObjRef>(v); }
  const AFunPtr& fun() const { return std::get<AFunPtr>(v); }

  friend auto operator<=>(const AVal&, const AVal&) = default;
};

inline std::string categoryName(const AVal& v) {
  static constexpr const char* names[] = {"Num", "Bool", "object", "function", "void"};
  return names[v.v.index()];
}

struct CurriedKey {
  Sid sid{};
  std::uint32_t count = 0;
  Eid anchor{};
  friend auto operator<=>(const CurriedKey&, const CurriedKey&) = default;
};

using AEnv = std::map<Ident, AVal>;
using AObjMem = std::map<std::uint32_t, AEnv>;
using CurriedTable = std::map<CurriedKey, std::set<std::vector<AVal>>>;

struct AState {
  AEnv env;
  AObjMem objMem{{0, AEnv{}}};
  std::uint32_t self = 0;
  CurriedTable curried;
  std::optional<AVal> ret;
  std::optional<AVal> ex;

  static AState initial() { return AState{}; }

  friend auto operator<=>(const AState&, const AState&) = default;
};

/// How a partial application records its argument lists in the curried
/// table. Accumulate adds to the lists already anchored at the key;
/// Overwrite replaces them, one successor state per curried prefix.
enum class CurriedUpdate { Accumulate, Overwrite };

struct AbstractOptions {
  /// Safety net for the fixed-point engines; finiteness makes it unreachable.
  std::size_t maxIterations = 100000;
  CurriedUpdate curriedUpdate = CurriedUpdate::Accumulate;
};

struct Diagnostic {
  std::uint32_t node = 0;
  std::string message;
  friend auto operator<=>(const Diagnostic&, const Diagnostic&) = default;
};

/// One step of a fixed-point engine. For calls `size` is the summary size
/// after the iteration; for loops it is the number of reached head states
/// plus exit pairs after the round. `instance` tells runs apart: the call key
/// ordinal for calls, the execution ordinal for loops.
struct EngineEvent {
  enum class Kind { Call, Loop };
  Kind kind;
  std::uint32_t node;
  std::size_t instance;
  std::size_t iteration;
  std::size_t size;
};

using EngineObserver = std::function<void(const EngineEvent&)>;

struct AnalysisStats {
  std::size_t callIterations = 0;
  std::size_t loopRounds = 0;
  std::size_t summaries = 0;
  std::size_t longestCallIteration = 0;
  std::size_t longestLoop = 0;
};

class AbstractInterp {
 public:
  using State = AState;
  using Value = AVal;
  using K = kernel::Monad<AbstractInterp>;
  template <class A>
  using T = kernel::Transformer<AbstractInterp, A>;
  template <class A>
  using Out = kernel::Outcome<AState, A>;
  using Table = kernel::FunctionTable<AbstractInterp>;
  using Unit = kernel::Unit;
  using CallFn = std::function<T<Value>(Sid, std::vector<Value>, Value)>;
  using CallKey = std::pair<Sid, AState>;

  explicit AbstractInterp(AbstractOptions options = {}, EngineObserver observer = {})
      : options_(options), observer_(std::move(observer)) {}

  static bool esc(const State& s) { return s.ret.has_value() || s.ex.has_value(); }

  T<Unit> asg(const Ident& id, const Value& v) const {
    return K::liftStates(record::singleton(record::focusUpdate<&State::env>([id, v](AEnv env) {
      env[id] = v;
      return env;
    })));
  }

  T<Value> val(const Ident& id) const {
    return [this, id](const Table& f, const State& s) -> Out<Value> {
      auto it = s.env.find(id);
      if (it == s.env.end()) {
        report(f, "possibly undefined variable " + id);
        return {};
      }
      return {{s, it->second}};
    };
  }

  Value conval(const Literal& c) const {
    return std::holds_alternative<bool>(c) ? Value::boolean() : Value::num();
  }

  T<Value> getinput() const { return K::pure(Value::num()); }

  T<Unit> dooutput(const Value& v) const {
    if (v.isVoid()) return diag<Unit>("used void function result");
    if (!v.isNum() && !v.isBool()) {
      return diag<Unit>("possibly unprintable value (" + categoryName(v) + ")");
    }
    return K::pure(Unit{});
  }

  T<Value> bin(BinOp op, const Value& a, const Value& b) const {
    if (a.isVoid() || b.isVoid()) return diag<Value>("used void function result");
    if (op == BinOp::Eq) {
      if (a.v.index() != b.v.index()) {
        return diag<Value>("possible comparison of " + categoryName(a) + " with " +
                           categoryName(b));
      }
      return K::pure(Value::boolean());
    }
    if (!a.isNum() || !b.isNum()) {
      return diag<Value>(std::string("possible type error: operator ") + spelling(op) +
                         " on " + categoryName(a) + " and " + categoryName(b));
    }
    return K::pure(isArithmetic(op) ? Value::num() : Value::boolean());
  }

  T<Unit> ret(const Value& v) const {
    return K::liftStates(record::singleton(record::focusUpdate<&State::ret>(
        [v](const std::optional<Value>&) { return std::optional<Value>(v); })));
  }

  T<Unit> fundecl(const Ident& id, Sid n) const { return asg(id, Value::fun(n)); }

  /// Both branches are explored whatever the guard's abstract value.
  template <class A>
  T<A> cond(const Value& v, T<A> whenTrue, T<A> whenFalse) const {
    if (!v.isBool()) return diag<A>("condition possibly not boolean (" + categoryName(v) + ")");
    return [whenTrue = std::move(whenTrue), whenFalse = std::move(whenFalse)](const Table& f,
                                                                              const State& s) {
      auto out = whenTrue(f, s);
      out.merge(whenFalse(f, s));
      return out;
    };
  }

  T<Value> apply(const Value& fn, std::vector<Value> args, const Value& self, Eid site,
                 const CallFn& call) const {
    if (fn.isVoid()) return diag<Value>("used void function result");
    if (!fn.isFun()) return diag<Value>("possibly calling a non-function (" + categoryName(fn) + ")");
    AFunPtr ptr = fn.fun();
    return [this, fn, ptr, args = std::move(args), self, site, call](const Table& f,
                                                                     const State& s) {
      Out<Value> out;
      std::size_t arity = f.arity(ptr.sid);
      std::size_t total = ptr.count + args.size();
      if (total > arity) {
        report(f, "too many arguments: " + std::to_string(total) + " given, " +
                      std::to_string(arity) + " expected");
        return out;
      }
      auto prefixes = curriedPrefixes(s, ptr);
      if (total == arity) {
        for (const auto& prefix : prefixes) out.merge(call(ptr.sid, concat(prefix, args), self)(f, s));
        return out;
      }
      if (args.empty()) {
        out.emplace(s, fn);
        return out;
      }
      CurriedKey key{ptr.sid, static_cast<std::uint32_t>(total), site};
      Value result = Value::fun(ptr.sid, key.count, site);
      if (options_.curriedUpdate == CurriedUpdate::Accumulate) {
        State next = s;
        auto& lists = next.curried[key];
        for (const auto& prefix : prefixes) lists.insert(concat(prefix, args));
        out.emplace(std::move(next), result);
      } else {
        for (const auto& prefix : prefixes) {
          State next = s;
          next.curried[key] = {concat(prefix, args)};
          out.emplace(std::move(next), result);
        }
      }
      return out;
    };
  }

  T<Value> get(const Value& obj, const Ident& id) const {
    if (obj.isVoid()) return diag<Value>("used void function result");
    if (!obj.isObj()) {
      return diag<Value>("possible member access on a non-object (" + categoryName(obj) + ")");
    }
    std::uint32_t site = obj.obj().site;
    return [this, site, id](const Table& f, const State& s) -> Out<Value> {
      const AEnv& members = object(s, site);
      auto it = members.find(id);
      if (it == members.end()) {
        report(f, "possibly undefined member " + id);
        return {};
      }
      return {{s, it->second}};
    };
  }

  T<Unit> set(const Value& obj, const Ident& id, const Value& v) const {
    if (obj.isVoid()) return diag<Unit>("used void function result");
    if (!obj.isObj()) {
      return diag<Unit>("possible member assignment on a non-object (" + categoryName(obj) + ")");
    }
    std::uint32_t site = obj.obj().site;
    return K::liftStates(
        record::singleton(record::focusUpdate<&State::objMem>([site, id, v](AObjMem mem) {
          mem[site][id] = v;
          return mem;
        })));
  }

  T<Value> getglobal() const { return K::pure(Value::obj(0)); }

  T<Value> getthis() const {
    return K::liftValue(
        record::focusRead<&State::self>([](std::uint32_t t) { return Value::obj(t); }));
  }

  /// The allocation site's abstract object is reset to the empty member map.
  T<Value> newobj(Eid site) const {
    return K::liftReturning(record::focusUpdateReturning<&State::objMem>([site](AObjMem mem) {
      mem[raw(site)] = AEnv{};
      return std::pair{std::move(mem), Value::obj(raw(site))};
    }));
  }

  T<Unit> throwValue(const Value& v) const {
    return K::liftStates(record::singleton(record::focusUpdate<&State::ex>(
        [v](const std::optional<Value>&) { return std::optional<Value>(v); })));
  }

  T<Unit> catchWith(const Ident& id, T<Unit> handler) const {
    return [id, handler = std::move(handler)](const Table& f, const State& s) {
      if (!s.ex) return K::pure(Unit{})(f, s);
      return handler(f, exs(s, id));
    };
  }

  static State exs(const State& s, const Ident& id) {
    auto move = record::focusUpdate<&State::env, &State::ex>([&id](auto fields) {
      auto& [env, ex] = fields;
      env[id] = *ex;
      ex.reset();
      return fields;
    });
    return move(s);
  }

  State enter(const State& caller, Sid, const std::vector<Value>& args, const Value& self,
              const std::vector<Ident>& params) const {
    if (!self.isObj()) throw InternalError("receiver is not an abstract object");
    State s;
    for (std::size_t k = 0; k < params.size(); ++k) s.env[params[k]] = args[k];
    s.objMem = caller.objMem;
    s.self = self.obj().site;
    s.curried = caller.curried;
    return s;
  }

  std::pair<State, Value> leave(const State& caller, const State& callee) const {
    State s = caller;
    s.objMem = callee.objMem;
    s.curried = callee.curried;
    s.ex = callee.ex;
    s.ret.reset();
    return {std::move(s), callee.ret ? *callee.ret : Value(VoidVal{})};
  }

  /// Loop fixed point: every state reaching the loop head is expanded once;
  /// exits from every number of unfoldings are collected.
  T<Unit> loop(T<kernel::LoopStep> step) const {
    return [this, step = std::move(step)](const Table& f, const State& entry) {
      std::uint32_t node = f.currentNode();
      std::size_t instance = loopRuns_++;
      Out<Unit> exits;
      std::set<State> heads{entry};
      std::set<State> frontier{entry};
      std::size_t round = 0;
      while (!frontier.empty()) {
        if (++round > options_.maxIterations) {
          throw AnalysisError("loop at node " + std::to_string(node) + " exceeded " +
                              std::to_string(options_.maxIterations) + " iterations");
        }
        ++stats_.loopRounds;
        std::set<State> next;
        for (const State& h : frontier) {
          for (const auto& [s1, p] : step(f, h)) {
            if (!p) {
              exits.emplace(s1, std::nullopt);
            } else if (*p == kernel::LoopStep::Done) {
              exits.emplace(s1, Unit{});
            } else if (heads.insert(s1).second) {
              next.insert(s1);
            }
          }
        }
        notify({EngineEvent::Kind::Loop, node, instance, round, heads.size() + exits.size()});
        frontier = std::move(next);
      }
      stats_.longestLoop = std::max(stats_.longestLoop, round);
      return exits;
    };
  }

  /// Call fixed point per (sid, entry state). Recursive calls to a key under
  /// evaluation read its current summary, starting from the empty set.
  std::set<State> runFunction(const Table& f, Sid n, const State& entry) {
    CallKey key{n, entry};
    auto found = summaries_.find(key);
    if (found != summaries_.end() && found->second.complete) return found->second.exits;
    if (auto act = active_.find(key); act != active_.end()) {
      Frame& top = frames_.back();
      top.minDep = std::min(top.minDep, act->second);
      frames_[act->second].readSelf = true;
      return summaries_[key].exits;
    }

    std::size_t depth = frames_.size();
    frames_.push_back(Frame{depth, false});
    active_.emplace(key, depth);
    auto [slot, fresh] = summaries_.try_emplace(key);
    Summary& summary = slot->second;
    if (fresh) summary.ordinal = summaries_.size() - 1;
    std::size_t iteration = 0;
    while (true) {
      if (++iteration > options_.maxIterations) {
        throw AnalysisError("call of function " + std::to_string(raw(n)) + " exceeded " +
                            std::to_string(options_.maxIterations) + " iterations");
      }
      ++stats_.callIterations;
      frames_.back().readSelf = false;
      auto exits = K::states(f.semantics().body(n)(f, entry));
      bool grew = false;
      for (const auto& s : exits) grew |= summary.exits.insert(s).second;
      notify({EngineEvent::Kind::Call, raw(n), summary.ordinal, iteration, summary.exits.size()});
      if (!grew || !frames_.back().readSelf) break;
    }
    stats_.longestCallIteration = std::max(stats_.longestCallIteration, iteration);

    std::size_t minDep = frames_.back().minDep;
    frames_.pop_back();
    active_.erase(key);
    summary.complete = minDep >= depth;
    if (!summary.complete && !frames_.empty()) {
      frames_.back().minDep = std::min(frames_.back().minDep, minDep);
    }
    stats_.summaries = summaries_.size();
    return summary.exits;
  }

  const std::set<Diagnostic>& diagnostics() const { return diagnostics_; }
  const AnalysisStats& stats() const { return stats_; }
  const AbstractOptions& options() const { return options_; }

  /// Exit-state summaries by call key, as accumulated so far.
  std::map<CallKey, std::set<State>> summaries() const {
    std::map<CallKey, std::set<State>> out;
    for (const auto& [k, s] : summaries_) out.emplace(k, s.exits);
    return out;
  }

 private:
  struct Summary {
    std::set<State> exits;
    bool complete = false;
    std::size_t ordinal = 0;
  };
  struct Frame {
    std::size_t minDep;
    bool readSelf;
  };

  template <class A>
  T<A> diag(std::string message) const {
    return [this, message = std::move(message)](const Table& f, const State&) {
      report(f, message);
      return Out<A>{};
    };
  }

  void report(const Table& f, std::string message) const {
    diagnostics_.insert(Diagnostic{f.currentNode(), std::move(message)});
  }

  void notify(const EngineEvent& e) const {
    if (observer_) observer_(e);
  }

  static std::set<std::vector<Value>> curriedPrefixes(const State& s, const AFunPtr& ptr) {
    if (ptr.count == 0) return {{}};
    auto it = s.curried.find(CurriedKey{ptr.sid, ptr.count, ptr.anchor});
    if (it == s.curried.end()) return {};
    return it->second;
  }

  static std::vector<Value> concat(std::vector<Value> a, const std::vector<Value>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  static const AEnv& object(const State& s, std::uint32_t site) {
    auto it = s.objMem.find(site);
    if (it == s.objMem.end()) {
      throw InternalError("abstract object " + std::to_string(site) + " is not allocated");
    }
    return it->second;
  }

  AbstractOptions options_;
  EngineObserver observer_;
  mutable std::size_t loopRuns_ = 0;
  // Per-run log and engine bookkeeping; a run is single-threaded.
  mutable std::set<Diagnostic> diagnostics_;
  mutable AnalysisStats stats_;
  std::map<CallKey, Summary> summaries_;
  std::map<CallKey, std::size_t> active_;
  std::vector<Frame> frames_;
};

struct AnalysisResult {
  std::set<AState> finals;
  std::set<Diagnostic> diagnostics;
  AnalysisStats stats;
};

/// Observer of an analysis: sees every statement with each incoming state.
using StatementObserver = std::function<void(Sid, const AState&)>;

inline AnalysisResult analyzeProgram(const Program& program, AbstractOptions options = {},
                                     EngineObserver observer = {},
                                     StatementObserver onStatement = {}) {
  AbstractInterp interp(options, std::move(observer));
  kernel::Semantics<AbstractInterp> sem(program, interp);
  kernel::Tracker<AState> tracker;
  tracker.onStatement = std::move(onStatement);
  auto table = sem.table(&tracker);
  auto finals = AbstractInterp::K::states(sem.stm(program.root())(table, AState::initial()));
  return AnalysisResult{std::move(finals), interp.diagnostics(), interp.stats()};
}

}  // namespace sdtl::abstract
