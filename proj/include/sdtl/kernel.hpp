#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "sdtl/ast.hpp"
#include "sdtl/errors.hpp"

// The parametric semantics. Meanings of statements and expressions are
// written once here against an interpretation `I`, which supplies the state
// and value carriers and every primitive operation. Concrete execution and
// abstract analysis are two such interpretations.
//
// An interpretation I provides:
//   types      State, Value (both totally ordered)
//   static     bool esc(const State&)
//   members    (T<X> below abbreviates Transformer<I, X>)
//     T<Unit>  asg(const Ident&, const Value&)
//     T<Value> val(const Ident&)
//     Value    conval(const Literal&)
//     T<Value> getinput()
//     T<Unit>  dooutput(const Value&)
//     T<Value> bin(BinOp, const Value&, const Value&)
//     T<Unit>  ret(const Value&)
//     T<Unit>  fundecl(const Ident&, Sid)
//     template <class A> T<A> cond(const Value&, T<A> whenTrue, T<A> whenFalse)
//     T<Value> apply(const Value& fn, std::vector<Value> args, const Value& self, Eid site,
//                    CallFn call)
//     T<Value> get(const Value& obj, const Ident&)
//     T<Unit>  set(const Value& obj, const Ident&, const Value&)
//     T<Value> getglobal(), getthis()
//     T<Value> newobj(Eid)
//     T<Unit>  throwValue(const Value&)
//     T<Unit>  catchWith(const Ident&, T<Unit> handler)
//     State    enter(const State& caller, Sid, const std::vector<Value>& args,
//                    const Value& self, const std::vector<Ident>& params)
//     std::pair<State, Value> leave(const State& caller, const State& callee)
//     T<Unit>  loop(T<LoopStep> step)              fixed point of a while loop
//     std::set<State> runFunction(const FunctionTable<I>&, Sid, const State& entry)
//
// States are ordered by identity only: the kernel compares them for
// equality and uses the total order solely to store them in sets.

namespace sdtl::kernel {

struct Unit {
  friend constexpr auto operator<=>(Unit, Unit) = default;
};

/// Payload of an outcome pair; nullopt is the Null marker that accompanies
/// escaping successor states.
template <class A>
using Payload = std::optional<A>;

template <class State, class A>
using Outcome = std::set<std::pair<State, Payload<A>>>;

template <class I>
class FunctionTable;

template <class I, class A>
using Transformer = std::function<Outcome<typename I::State, A>(const FunctionTable<I>&,
                                                                  const typename I::State&)>;

/// Whether a while-loop body should run again or the loop is finished.
enum class LoopStep { Again, Done };

/// Per-run bookkeeping threaded through the function table: the stack of
/// syntax nodes under evaluation plus optional observers.
template <class State>
struct Tracker {
  std::vector<std::uint32_t> nodes;
  /// Called on exit of every node meaning with (node id, outcome size).
  std::function<void(std::uint32_t, std::size_t)> onNode;
  /// Called on entry of every statement meaning with the incoming state.
  std::function<void(Sid, const State&)> onStatement;

  std::uint32_t current() const { return nodes.empty() ? 0 : nodes.back(); }
};

template <class I>
class Semantics;

/// The function table F: maps a declaration sid to its declaration and to the
/// state transformation of its body. How that transformation is realized
/// (direct recursion or a summary-based fixed point) is the
/// interpretation's choice, made in runFunction.
template <class I>
class FunctionTable {
 public:
  using State = typename I::State;

  FunctionTable(const Program* program, const Semantics<I>* sem, I* interp,
                Tracker<State>* tracker)
      : program_(program), sem_(sem), interp_(interp), tracker_(tracker) {}

  const Program& program() const { return *program_; }
  const Stm& stm(Sid n) const { return program_->stm(n); }
  const std::vector<Ident>& param(Sid n) const { return program_->param(n); }
  std::size_t arity(Sid n) const { return program_->arity(n); }

  std::set<State> run(Sid n, const State& entry) const {
    return interp_->runFunction(*this, n, entry);
  }

  const Semantics<I>& semantics() const { return *sem_; }
  I& interpretation() const { return *interp_; }
  Tracker<State>& tracker() const { return *tracker_; }
  std::uint32_t currentNode() const { return tracker_ ? tracker_->current() : 0; }

 private:
  const Program* program_;
  const Semantics<I>* sem_;
  I* interp_;
  Tracker<State>* tracker_;
};

/// Monadic combinators over Transformer<I, ·>.
template <class I>
struct Monad {
  using State = typename I::State;
  using Table = FunctionTable<I>;
  template <class A>
  using T = Transformer<I, A>;
  template <class A>
  using Out = Outcome<State, A>;

  /// I_A: yields {(s, v)} for every state.
  template <class A>
  static T<A> pure(A v) {
    return [v = std::move(v)](const Table&, const State& s) { return Out<A>{{s, v}}; };
  }

  /// I_V: lifts State -> a.
  template <class G>
  static auto liftValue(G g) -> T<std::decay_t<std::invoke_result_t<G&, const State&>>> {
    using A = std::decay_t<std::invoke_result_t<G&, const State&>>;
    return [g = std::move(g)](const Table&, const State& s) { return Out<A>{{s, g(s)}}; };
  }

  /// I_S: lifts a non-deterministic transformation State -> set of State.
  template <class G>
  static T<Unit> liftStates(G g) {
    return [g = std::move(g)](const Table&, const State& s) {
      Out<Unit> out;
      for (auto&& s1 : g(s)) out.emplace(s1, Unit{});
      return out;
    };
  }

  /// Lifts a deterministic update that also yields a value, State -> (State, a).
  template <class G>
  static auto liftReturning(G g) {
    using R = std::decay_t<std::invoke_result_t<G&, const State&>>;
    using A = typename R::second_type;
    return T<A>([g = std::move(g)](const Table&, const State& s) {
      auto [s1, a] = g(s);
      return Out<A>{{std::move(s1), std::move(a)}};
    });
  }

  /// The transformer with no successors at all (a dead branch).
  template <class A>
  static T<A> none() {
    return [](const Table&, const State&) { return Out<A>{}; };
  }

  /// Escaping bind: escaping successors are passed through with Null,
  /// everything else continues into k.
  template <class A, class K>
  static auto bind(T<A> t, K k) -> std::invoke_result_t<K&, const A&> {
    using R = std::invoke_result_t<K&, const A&>;
    using O = std::invoke_result_t<const R&, const Table&, const State&>;
    return [t = std::move(t), k = std::move(k)](const Table& f, const State& s) {
      O out;
      for (const auto& [s1, a] : t(f, s)) {
        if (I::esc(s1) || !a) {
          out.emplace(s1, std::nullopt);
          continue;
        }
        out.merge(k(*a)(f, s1));
      }
      return out;
    };
  }

  /// Non-escaping bind: k sees every successor, including escaping ones and
  /// Null payloads.
  template <class A, class K>
  static auto bindNoEscape(T<A> t, K k) -> std::invoke_result_t<K&, const Payload<A>&> {
    using R = std::invoke_result_t<K&, const Payload<A>&>;
    using O = std::invoke_result_t<const R&, const Table&, const State&>;
    return [t = std::move(t), k = std::move(k)](const Table& f, const State& s) {
      O out;
      for (const auto& [s1, a] : t(f, s)) out.merge(k(a)(f, s1));
      return out;
    };
  }

  template <class A>
  static std::set<State> states(const Out<A>& out) {
    std::set<State> r;
    for (const auto& [s, a] : out) r.insert(s);
    return r;
  }

  /// Direct unfolding of a loop: keep running `step` on every state that asks
  /// for another iteration. Terminates iff the object program's loop does.
  static T<Unit> unfold(T<LoopStep> step) {
    return [step = std::move(step)](const Table& f, const State& s) {
      Out<Unit> result;
      std::set<State> frontier{s};
      while (!frontier.empty()) {
        std::set<State> next;
        for (const State& h : frontier) {
          for (const auto& [s1, p] : step(f, h)) {
            if (!p) {
              result.emplace(s1, std::nullopt);
            } else if (*p == LoopStep::Done) {
              result.emplace(s1, Unit{});
            } else {
              next.insert(s1);
            }
          }
        }
        frontier = std::move(next);
      }
      return result;
    };
  }
};

/// The semantic functions S, E and L for every SDTL construct.
template <class I>
class Semantics {
 public:
  using State = typename I::State;
  using Value = typename I::Value;
  using K = Monad<I>;
  template <class A>
  using T = Transformer<I, A>;
  using Table = FunctionTable<I>;
  using CallFn = std::function<T<Value>(Sid, std::vector<Value>, Value)>;

  Semantics(const Program& program, I& interp) : program_(program), interp_(interp) {}

  const Program& program() const { return program_; }
  I& interpretation() const { return interp_; }

  /// A function table for this program: the interpretation's runFunction
  /// supplies the meaning of each entry.
  Table table(Tracker<State>* tracker) const { return Table(&program_, this, &interp_, tracker); }

  /// Meaning of the body of the function declared at `n`.
  T<Unit> body(Sid n) const { return stm(program_.body(n)); }

  T<Unit> stm(const Stm& s) const {
    return at<Unit>(raw(s.sid), &s, std::visit([&](const auto& n) { return stmNode(s, n); }, s.node));
  }

  T<Value> exp(const Exp& e) const {
    return at<Value>(raw(e.eid), nullptr,
                     std::visit([&](const auto& n) { return expNode(e, n); }, e.node));
  }

  T<Value> lexp(const Lexp& l) const {
    return at<Value>(raw(l.eid), nullptr,
                     std::visit([&](const auto& n) { return lexpNode(n); }, l.node));
  }

  /// Left-to-right evaluation of call arguments.
  T<std::vector<Value>> evalParams(const std::vector<ExpPtr>& exps) const {
    return evalFrom(exps, 0, {});
  }

  /// Runs the body of `n` from the state `enter` builds, then maps every
  /// callee exit state back through `leave`.
  T<Value> call(Sid n, std::vector<Value> args, Value self) const {
    return [this, n, args = std::move(args), self = std::move(self)](const Table& f,
                                                                      const State& caller) {
      Outcome<State, Value> out;
      State entry = interp_.enter(caller, n, args, self, f.param(n));
      for (const State& exit : f.run(n, entry)) {
        auto [after, v] = interp_.leave(caller, exit);
        out.emplace(std::move(after), std::move(v));
      }
      return out;
    };
  }

 private:
  template <class A>
  T<A> at(std::uint32_t id, const Stm* statement, T<A> t) const {
    return [id, statement, t = std::move(t)](const Table& f, const State& s) {
      auto* tracker = &f.tracker();
      tracker->nodes.push_back(id);
      struct Pop {
        Tracker<State>* tr;
        ~Pop() { tr->nodes.pop_back(); }
      } pop{tracker};
      if (statement && tracker->onStatement) tracker->onStatement(statement->sid, s);
      try {
        auto out = t(f, s);
        if (tracker->onNode) tracker->onNode(id, out.size());
        return out;
      } catch (RuntimeError& e) {
        e.tag(id);
        throw;
      }
    };
  }

  CallFn caller() const {
    return [this](Sid n, std::vector<Value> args, Value self) {
      return call(n, std::move(args), std::move(self));
    };
  }

  T<std::vector<Value>> evalFrom(const std::vector<ExpPtr>& exps, std::size_t i,
                                 std::vector<Value> acc) const {
    if (i == exps.size()) return K::pure(std::move(acc));
    return K::bind(exp(*exps[i]), [this, &exps, i, acc = std::move(acc)](const Value& v) {
      auto next = acc;
      next.push_back(v);
      return evalFrom(exps, i + 1, std::move(next));
    });
  }

  // ---- statements --------------------------------------------------------

  T<Unit> stmNode(const Stm&, const Stm::Nil&) const { return K::pure(Unit{}); }

  T<Unit> stmNode(const Stm&, const Stm::Seq& n) const {
    return K::bind(stm(*n.first), [this, &n](const Unit&) { return stm(*n.second); });
  }

  T<Unit> stmNode(const Stm&, const Stm::ExpStm& n) const {
    return K::bind(exp(*n.exp), [](const Value&) { return K::pure(Unit{}); });
  }

  T<Unit> stmNode(const Stm&, const Stm::Return& n) const {
    return K::bind(exp(*n.exp), [this](const Value& v) { return interp_.ret(v); });
  }

  T<Unit> stmNode(const Stm&, const Stm::If& n) const {
    return K::bind(exp(*n.cond), [this, &n](const Value& v) {
      return interp_.template cond<Unit>(v, stm(*n.then), K::pure(Unit{}));
    });
  }

  T<Unit> stmNode(const Stm&, const Stm::IfElse& n) const {
    return K::bind(exp(*n.cond), [this, &n](const Value& v) {
      return interp_.template cond<Unit>(v, stm(*n.then), stm(*n.otherwise));
    });
  }

  T<Unit> stmNode(const Stm&, const Stm::Assign& n) const {
    if (auto* var = std::get_if<Lexp::Var>(&n.target->node)) {
      return K::bind(exp(*n.value),
                     [this, var](const Value& v) { return interp_.asg(var->name, v); });
    }
    const auto& member = std::get<Lexp::Member>(n.target->node);
    return K::bind(exp(*member.object), [this, &n, &member](const Value& r) {
      return K::bind(exp(*n.value), [this, &member, r](const Value& v) {
        return interp_.set(r, member.member, v);
      });
    });
  }

  T<Unit> stmNode(const Stm&, const Stm::While& n) const {
    T<LoopStep> step = K::bind(exp(*n.cond), [this, &n](const Value& v) {
      T<LoopStep> again =
          K::bind(stm(*n.body), [](const Unit&) { return K::pure(LoopStep::Again); });
      return interp_.template cond<LoopStep>(v, std::move(again), K::pure(LoopStep::Done));
    });
    return interp_.loop(std::move(step));
  }

  T<Unit> stmNode(const Stm&, const Stm::Output& n) const {
    return K::bind(exp(*n.exp), [this](const Value& v) { return interp_.dooutput(v); });
  }

  T<Unit> stmNode(const Stm& s, const Stm::FunDecl& n) const {
    return interp_.fundecl(n.name, s.sid);
  }

  T<Unit> stmNode(const Stm&, const Stm::TryCatch& n) const {
    return K::bindNoEscape(stm(*n.body), [this, &n](const Payload<Unit>&) {
      return interp_.catchWith(n.var, stm(*n.handler));
    });
  }

  T<Unit> stmNode(const Stm&, const Stm::Throw& n) const {
    return K::bind(exp(*n.exp), [this](const Value& v) { return interp_.throwValue(v); });
  }

  // ---- expressions -------------------------------------------------------

  T<Value> expNode(const Exp&, const Exp::Con& n) const {
    return K::pure(interp_.conval(n.value));
  }

  T<Value> expNode(const Exp&, const Exp::LexpRef& n) const { return lexp(*n.lexp); }

  T<Value> expNode(const Exp&, const Exp::Input&) const { return interp_.getinput(); }

  T<Value> expNode(const Exp& e, const Exp::Call& n) const {
    return K::bind(lexp(*n.callee), [this, &e, &n](const Value& fn) {
      return K::bind(evalParams(n.args), [this, &e, fn](const std::vector<Value>& args) {
        return K::bind(interp_.getthis(), [this, &e, fn, args](const Value& self) {
          return interp_.apply(fn, args, self, e.eid, caller());
        });
      });
    });
  }

  T<Value> expNode(const Exp& e, const Exp::MethodCall& n) const {
    return K::bind(exp(*n.receiver), [this, &e, &n](const Value& self) {
      return K::bind(interp_.get(self, n.member), [this, &e, &n, self](const Value& fn) {
        return K::bind(evalParams(n.args), [this, &e, fn, self](const std::vector<Value>& args) {
          return interp_.apply(fn, args, self, e.eid, caller());
        });
      });
    });
  }

  T<Value> expNode(const Exp&, const Exp::Binary& n) const {
    return K::bind(exp(*n.lhs), [this, &n](const Value& c1) {
      return K::bind(exp(*n.rhs),
                     [this, &n, c1](const Value& c2) { return interp_.bin(n.op, c1, c2); });
    });
  }

  T<Value> expNode(const Exp&, const Exp::Paren& n) const { return exp(*n.inner); }

  T<Value> expNode(const Exp&, const Exp::Global&) const { return interp_.getglobal(); }

  T<Value> expNode(const Exp&, const Exp::This&) const { return interp_.getthis(); }

  T<Value> expNode(const Exp& e, const Exp::New& n) const {
    return K::bind(lexp(*n.callee), [this, &e, &n](const Value& fn) {
      return K::bind(evalParams(n.args), [this, &e, fn](const std::vector<Value>& args) {
        return K::bind(interp_.newobj(e.eid), [this, &e, fn, args](const Value& obj) {
          return K::bind(interp_.apply(fn, args, obj, e.eid, caller()),
                         [obj](const Value&) { return K::pure(obj); });
        });
      });
    });
  }

  // ---- left expressions --------------------------------------------------

  T<Value> lexpNode(const Lexp::Var& v) const { return interp_.val(v.name); }

  T<Value> lexpNode(const Lexp::Member& m) const {
    return K::bind(exp(*m.object), [this, &m](const Value& obj) {
      return interp_.get(obj, m.member);
    });
  }

  const Program& program_;
  I& interp_;
};

}  // namespace sdtl::kernel
