#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "sdtl/ast.hpp"
#include "sdtl/errors.hpp"
#include "sdtl/kernel.hpp"
#include "sdtl/record.hpp"

namespace sdtl::concrete {

struct ObjRef {
  std::uint64_t id = 0;
  friend auto operator<=>(const ObjRef&, const ObjRef&) = default;
};

/// Marker for the result of a call whose body never returned.
struct VoidVal {
  friend auto operator<=>(const VoidVal&, const VoidVal&) = default;
};

struct CValue;

/// A function pointer with the arguments curried into it so far.
struct FunPtr {
  Sid sid{};
  std::vector<CValue> curried;
};

struct CValue {
  using Rep = std::variant<Integer, bool, ObjRef, FunPtr, VoidVal>;
  Rep v;

  CValue() : v(VoidVal{}) {}
  CValue(Integer i) : v(std::move(i)) {}
  CValue(int i) : v(Integer(i)) {}
  CValue(bool b) : v(b) {}
  CValue(ObjRef r) : v(r) {}
  CValue(FunPtr f) : v(std::move(f)) {}
  CValue(VoidVal x) : v(x) {}

  bool isInt() const { return std::holds_alternative<Integer>(v); }
  bool isBool() const { return std::holds_alternative<bool>(v); }
  bool isObj() const { return std::holds_alternative<ObjRef>(v); }
  bool isFun() const { return std::holds_alternative<FunPtr>(v); }
  bool isVoid() const { return std::holds_alternative<VoidVal>(v); }

  const Integer& integer() const { return std::get<Integer>(v); }
  bool boolean() const { return std::get<bool>(v); }
  ObjRef obj() const { return std::get<ObjRef>(v); }
  const FunPtr& fun() const { return std::get<FunPtr>(v); }
};

bool operator==(const CValue& a, const CValue& b);
bool operator<(const CValue& a, const CValue& b);

inline bool operator==(const FunPtr& a, const FunPtr& b) {
  return a.sid == b.sid && a.curried == b.curried;
}
inline bool operator<(const FunPtr& a, const FunPtr& b) {
  return std::tie(a.sid, a.curried) < std::tie(b.sid, b.curried);
}
inline bool operator==(const CValue& a, const CValue& b) { return a.v == b.v; }
inline bool operator<(const CValue& a, const CValue& b) { return a.v < b.v; }

using Env = std::map<Ident, CValue>;

/// A heap object: its members plus the `new` expression that created it
/// (Eid 0 for the global object). The site is bookkeeping for the soundness
/// harness; no primitive reads it.
struct CObject {
  Eid site{};
  Env members;

  friend bool operator==(const CObject& a, const CObject& b) {
    return a.site == b.site && a.members == b.members;
  }
  friend bool operator<(const CObject& a, const CObject& b) {
    return std::tie(a.site, a.members) < std::tie(b.site, b.members);
  }
};

using ObjMem = std::map<std::uint64_t, CObject>;

struct IOState {
  std::vector<Integer> input;
  std::vector<Integer> output;

  friend bool operator==(const IOState& a, const IOState& b) {
    return a.input == b.input && a.output == b.output;
  }
  friend bool operator<(const IOState& a, const IOState& b) {
    return std::tie(a.input, a.output) < std::tie(b.input, b.output);
  }
};

struct CState {
  Env env;
  ObjMem objMem{{0, CObject{}}};
  std::uint64_t self = 0;
  std::optional<CValue> ret;
  std::optional<CValue> ex;
  IOState io;

  static CState initial(std::vector<Integer> inputs = {}) {
    CState s;
    s.io.input = std::move(inputs);
    return s;
  }

  friend bool operator==(const CState& a, const CState& b) {
    return std::tie(a.env, a.objMem, a.self, a.ret, a.ex, a.io) ==
           std::tie(b.env, b.objMem, b.self, b.ret, b.ex, b.io);
  }
  friend bool operator<(const CState& a, const CState& b) {
    return std::tie(a.env, a.objMem, a.self, a.ret, a.ex, a.io) <
           std::tie(b.env, b.objMem, b.self, b.ret, b.ex, b.io);
  }
};

struct ConcreteOptions {
  /// Statement evaluations allowed before the run is abandoned.
  std::uint64_t fuel = 5'000'000;
  /// Nested calls allowed before the run is abandoned.
  std::size_t maxDepth = 400;
};

inline std::string categoryName(const CValue& v) {
  static constexpr const char* names[] = {"integer", "boolean", "object", "function", "void"};
  return names[v.v.index()];
}

class ConcreteInterp {
 public:
  using State = CState;
  using Value = CValue;
  using K = kernel::Monad<ConcreteInterp>;
  template <class A>
  using T = kernel::Transformer<ConcreteInterp, A>;
  using Table = kernel::FunctionTable<ConcreteInterp>;
  using Unit = kernel::Unit;
  using CallFn = std::function<T<Value>(Sid, std::vector<Value>, Value)>;

  explicit ConcreteInterp(ConcreteOptions options = {}) : options_(options) {}

  static bool esc(const State& s) { return s.ret.has_value() || s.ex.has_value(); }

  T<Unit> asg(const Ident& id, const Value& v) const {
    return K::liftStates(record::singleton(record::focusUpdate<&State::env>([id, v](Env env) {
      env[id] = v;
      return env;
    })));
  }

  T<Value> val(const Ident& id) const {
    return K::liftValue(record::focusRead<&State::env>([id](const Env& env) {
      auto it = env.find(id);
      if (it == env.end()) throw RuntimeError("undefined variable " + id);
      return it->second;
    }));
  }

  Value conval(const Literal& c) const {
    return std::visit([](const auto& x) { return Value(x); }, c);
  }

  T<Value> getinput() const {
    return K::liftReturning(record::focusUpdateReturning<&State::io>([](IOState io) {
      if (io.input.empty()) throw RuntimeError("input exhausted");
      Integer head = io.input.front();
      io.input.erase(io.input.begin());
      return std::pair{std::move(io), Value(std::move(head))};
    }));
  }

  T<Unit> dooutput(const Value& v) const {
    requireUsable(v);
    Integer printed;
    if (v.isInt()) {
      printed = v.integer();
    } else if (v.isBool()) {
      printed = v.boolean() ? 1 : 0;
    } else {
      throw RuntimeError("unprintable value (" + categoryName(v) + ")");
    }
    return K::liftStates(
        record::singleton(record::focusUpdate<&State::io>([printed](IOState io) {
          io.output.push_back(printed);
          return io;
        })));
  }

  T<Value> bin(BinOp op, const Value& a, const Value& b) const {
    return K::pure(binary(op, a, b));
  }

  static Value binary(BinOp op, const Value& a, const Value& b) {
    requireUsable(a);
    requireUsable(b);
    if (op == BinOp::Eq) {
      if (a.v.index() != b.v.index()) {
        throw RuntimeError("cannot compare " + categoryName(a) + " with " + categoryName(b));
      }
      return Value(a == b);
    }
    if (!a.isInt() || !b.isInt()) {
      throw RuntimeError(std::string("operator ") + spelling(op) + " expects integers, got " +
                         categoryName(a) + " and " + categoryName(b));
    }
    const Integer& x = a.integer();
    const Integer& y = b.integer();
    switch (op) {
      case BinOp::Add: return Value(Integer(x + y));
      case BinOp::Sub: return Value(Integer(x - y));
      case BinOp::Mul: return Value(Integer(x * y));
      case BinOp::Div:
        if (y == 0) throw RuntimeError("division by zero");
        return Value(Integer(x / y));
      case BinOp::Gt: return Value(x > y);
      case BinOp::Lt: return Value(x < y);
      case BinOp::Eq: break;
    }
    throw InternalError("unhandled operator");
  }

  T<Unit> ret(const Value& v) const {
    return K::liftStates(record::singleton(record::focusUpdate<&State::ret>(
        [v](const std::optional<Value>&) { return std::optional<Value>(v); })));
  }

  T<Unit> fundecl(const Ident& id, Sid n) const { return asg(id, Value(FunPtr{n, {}})); }

  template <class A>
  T<A> cond(const Value& v, T<A> whenTrue, T<A> whenFalse) const {
    requireUsable(v);
    if (!v.isBool()) throw RuntimeError("condition not boolean (" + categoryName(v) + ")");
    return v.boolean() ? std::move(whenTrue) : std::move(whenFalse);
  }

  T<Value> apply(const Value& fn, std::vector<Value> args, const Value& self, Eid,
                 const CallFn& call) const {
    requireUsable(fn);
    if (!fn.isFun()) throw RuntimeError("calling a non-function (" + categoryName(fn) + ")");
    const FunPtr& ptr = fn.fun();
    std::vector<Value> all = ptr.curried;
    all.insert(all.end(), std::make_move_iterator(args.begin()),
               std::make_move_iterator(args.end()));
    Sid n = ptr.sid;
    return [n, all = std::move(all), self, call](const Table& f, const State& s) {
      std::size_t arity = f.arity(n);
      if (all.size() == arity) return call(n, all, self)(f, s);
      if (all.size() > arity) {
        throw RuntimeError("too many arguments: " + std::to_string(all.size()) + " given, " +
                           std::to_string(arity) + " expected");
      }
      return K::pure(Value(FunPtr{n, all}))(f, s);
    };
  }

  T<Value> get(const Value& obj, const Ident& id) const {
    std::uint64_t r = objectRef(obj, "member access");
    return K::liftValue(record::focusRead<&State::objMem>([r, id](const ObjMem& mem) {
      const auto& members = object(mem, r).members;
      auto it = members.find(id);
      if (it == members.end()) throw RuntimeError("undefined member " + id);
      return it->second;
    }));
  }

  T<Unit> set(const Value& obj, const Ident& id, const Value& v) const {
    std::uint64_t r = objectRef(obj, "member assignment");
    return K::liftStates(
        record::singleton(record::focusUpdate<&State::objMem>([r, id, v](ObjMem mem) {
          object(mem, r);
          mem[r].members[id] = v;
          return mem;
        })));
  }

  T<Value> getglobal() const { return K::pure(Value(ObjRef{0})); }

  T<Value> getthis() const {
    return K::liftValue(
        record::focusRead<&State::self>([](std::uint64_t t) { return Value(ObjRef{t}); }));
  }

  T<Value> newobj(Eid site) const {
    return K::liftReturning(record::focusUpdateReturning<&State::objMem>([site](ObjMem mem) {
      std::uint64_t n = mem.size();
      mem[n] = CObject{site, {}};
      return std::pair{std::move(mem), Value(ObjRef{n})};
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

  /// Entry state of a catch block: the pending exception moves into `id`.
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
    State s;
    for (std::size_t k = 0; k < params.size(); ++k) s.env[params[k]] = args[k];
    s.objMem = caller.objMem;
    s.self = objectRef(self, "receiver");
    s.io = caller.io;
    return s;
  }

  std::pair<State, Value> leave(const State& caller, const State& callee) const {
    State s = caller;
    s.objMem = callee.objMem;
    s.io = callee.io;
    s.ex = callee.ex;
    s.ret.reset();
    return {std::move(s), callee.ret ? *callee.ret : Value(VoidVal{})};
  }

  T<Unit> loop(T<kernel::LoopStep> step) const { return K::unfold(std::move(step)); }

  std::set<State> runFunction(const Table& f, Sid n, const State& entry) {
    if (depth_ >= options_.maxDepth) {
      throw BudgetExceeded("call depth limit " + std::to_string(options_.maxDepth) + " exceeded");
    }
    ++depth_;
    struct Leave {
      std::size_t& d;
      ~Leave() { --d; }
    } guard{depth_};
    return K::states(f.semantics().body(n)(f, entry));
  }

  const ConcreteOptions& options() const { return options_; }

 private:
  static void requireUsable(const Value& v) {
    if (v.isVoid()) throw RuntimeError("used void function result");
  }

  static std::uint64_t objectRef(const Value& v, const char* what) {
    requireUsable(v);
    if (!v.isObj()) throw RuntimeError(std::string(what) + " on a non-object (" + categoryName(v) + ")");
    return v.obj().id;
  }

  static const CObject& object(const ObjMem& mem, std::uint64_t r) {
    auto it = mem.find(r);
    if (it == mem.end()) throw InternalError("dangling object reference " + std::to_string(r));
    return it->second;
  }

  ConcreteOptions options_;
  std::size_t depth_ = 0;
};

struct RunResult {
  CState state;
  std::vector<Integer> output() const { return state.io.output; }
};

/// Observer of a concrete run: sees every statement with its incoming state.
using StatementObserver = std::function<void(Sid, const CState&)>;

/// Runs `program` from the initial state with the given input queue. Throws
/// RuntimeError (tagged with the offending node id) on a run-time error.
inline RunResult runProgram(const Program& program, std::vector<Integer> inputs,
                            ConcreteOptions options = {}, StatementObserver observe = {}) {
  ConcreteInterp interp(options);
  kernel::Semantics<ConcreteInterp> sem(program, interp);
  kernel::Tracker<CState> tracker;
  std::uint64_t steps = 0;
  tracker.onStatement = [&](Sid n, const CState& s) {
    if (++steps > options.fuel) {
      throw BudgetExceeded("step budget of " + std::to_string(options.fuel) + " exhausted");
    }
    if (observe) observe(n, s);
  };
  auto table = sem.table(&tracker);
  auto finals =
      ConcreteInterp::K::states(sem.stm(program.root())(table, CState::initial(std::move(inputs))));
  if (finals.size() != 1) {
    throw InternalError("concrete run produced " + std::to_string(finals.size()) + " states");
  }
  return RunResult{*finals.begin()};
}

}  // namespace sdtl::concrete
