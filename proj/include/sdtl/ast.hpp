#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sdtl/errors.hpp"

namespace sdtl {

using Integer = boost::multiprecision::cpp_int;

/// Statement and expression identifiers share one counter, so every id in a
/// program is globally unique. They stay distinct types so a statement id
/// cannot be passed where an expression id is expected.
enum class Sid : std::uint32_t {};
enum class Eid : std::uint32_t {};

constexpr std::uint32_t raw(Sid s) { return static_cast<std::uint32_t>(s); }
constexpr std::uint32_t raw(Eid e) { return static_cast<std::uint32_t>(e); }

using Ident = std::string;

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class BinOp { Add, Sub, Mul, Div, Gt, Lt, Eq };

inline const char* spelling(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Gt: return ">";
    case BinOp::Lt: return "<";
    case BinOp::Eq: return "==";
  }
  return "?";
}

inline bool isArithmetic(BinOp op) {
  return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul || op == BinOp::Div;
}

/// A source literal: integer or boolean.
using Literal = std::variant<Integer, bool>;

struct Stm;
struct Exp;
struct Lexp;
using StmPtr = std::unique_ptr<Stm>;
using ExpPtr = std::unique_ptr<Exp>;
using LexpPtr = std::unique_ptr<Lexp>;

struct Lexp {
  struct Var {
    Ident name;
  };
  struct Member {
    ExpPtr object;
    Ident member;
  };

  Eid eid{};
  SourcePos pos;
  std::variant<Var, Member> node;
};

struct Exp {
  struct Con {
    Literal value;
  };
  struct LexpRef {
    LexpPtr lexp;
  };
  struct Input {};
  struct Call {
    LexpPtr callee;
    std::vector<ExpPtr> args;
  };
  struct MethodCall {
    ExpPtr receiver;
    Ident member;
    std::vector<ExpPtr> args;
  };
  struct Binary {
    BinOp op;
    ExpPtr lhs;
    ExpPtr rhs;
  };
  struct Paren {
    ExpPtr inner;
  };
  struct Global {};
  struct This {};
  struct New {
    LexpPtr callee;
    std::vector<ExpPtr> args;
  };

  Eid eid{};
  SourcePos pos;
  std::variant<Con, LexpRef, Input, Call, MethodCall, Binary, Paren, Global, This, New> node;
};

struct Stm {
  struct Nil {};
  struct Seq {
    StmPtr first;
    StmPtr second;
  };
  struct ExpStm {
    ExpPtr exp;
  };
  struct Output {
    ExpPtr exp;
  };
  struct Assign {
    LexpPtr target;
    ExpPtr value;
  };
  struct If {
    ExpPtr cond;
    StmPtr then;
  };
  struct IfElse {
    ExpPtr cond;
    StmPtr then;
    StmPtr otherwise;
  };
  struct While {
    ExpPtr cond;
    StmPtr body;
  };
  struct FunDecl {
    Ident name;
    std::vector<Ident> params;
    StmPtr body;
  };
  struct Return {
    ExpPtr exp;
  };
  struct TryCatch {
    StmPtr body;
    Ident var;
    StmPtr handler;
  };
  struct Throw {
    ExpPtr exp;
  };

  Sid sid{};
  SourcePos pos;
  std::variant<Nil, Seq, ExpStm, Output, Assign, If, IfElse, While, FunDecl, Return, TryCatch,
               Throw>
      node;
};

inline const char* kindName(const Stm& s) {
  static constexpr const char* names[] = {"Nil",    "Seq",    "ExpStm", "Output",
                                          "Assign", "If",     "IfElse", "While",
                                          "FunDecl", "Return", "TryCatch", "Throw"};
  return names[s.node.index()];
}

inline const char* kindName(const Exp& e) {
  static constexpr const char* names[] = {"Con",        "LexpRef", "Input",  "Call",
                                          "MethodCall", "BinOp",   "Paren",  "Global",
                                          "This",       "New"};
  return names[e.node.index()];
}

inline const char* kindName(const Lexp& l) {
  return std::holds_alternative<Lexp::Var>(l.node) ? "Var" : "Member";
}

/// A parsed program: the id-annotated tree plus the registry of function
/// declarations keyed by their sid.
class Program {
 public:
  Program() = default;
  Program(StmPtr root, std::uint32_t nodeCount) : root_(std::move(root)), nodeCount_(nodeCount) {
    collect(*root_);
  }

  Program(Program&&) = default;
  Program& operator=(Program&&) = default;
  Program(const Program&) = delete;
  Program& operator=(const Program&) = delete;

  const Stm& root() const { return *root_; }
  std::uint32_t nodeCount() const { return nodeCount_; }

  /// Every registered function, in sid order.
  const std::map<Sid, const Stm*>& functions() const { return functions_; }

  /// The FunDecl statement registered under `n`.
  const Stm& stm(Sid n) const { return *lookup(n); }

  const Stm& body(Sid n) const { return *decl(n).body; }

  const std::vector<Ident>& param(Sid n) const { return decl(n).params; }

  std::size_t arity(Sid n) const { return decl(n).params.size(); }

  bool isFunction(Sid n) const { return functions_.count(n) != 0; }

 private:
  const Stm* lookup(Sid n) const {
    auto it = functions_.find(n);
    if (it == functions_.end()) {
      throw InternalError("no function registered under sid " + std::to_string(raw(n)));
    }
    return it->second;
  }

  const Stm::FunDecl& decl(Sid n) const { return std::get<Stm::FunDecl>(lookup(n)->node); }

  void collect(const Stm& s);
  void collect(const Exp& e);
  void collect(const Lexp& l);

  StmPtr root_;
  std::uint32_t nodeCount_ = 0;
  std::map<Sid, const Stm*> functions_;
};

namespace detail {
template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;
}  // namespace detail

using detail::Overloaded;

inline void Program::collect(const Lexp& l) {
  if (auto* m = std::get_if<Lexp::Member>(&l.node)) collect(*m->object);
}

inline void Program::collect(const Exp& e) {
  std::visit(Overloaded{
                 [&](const Exp::LexpRef& n) { collect(*n.lexp); },
                 [&](const Exp::Call& n) {
                   collect(*n.callee);
                   for (auto& a : n.args) collect(*a);
                 },
                 [&](const Exp::MethodCall& n) {
                   collect(*n.receiver);
                   for (auto& a : n.args) collect(*a);
                 },
                 [&](const Exp::Binary& n) {
                   collect(*n.lhs);
                   collect(*n.rhs);
                 },
                 [&](const Exp::Paren& n) { collect(*n.inner); },
                 [&](const Exp::New& n) {
                   collect(*n.callee);
                   for (auto& a : n.args) collect(*a);
                 },
                 [](const auto&) {},
             },
             e.node);
}

inline void Program::collect(const Stm& s) {
  std::visit(Overloaded{
                 [&](const Stm::Seq& n) {
                   collect(*n.first);
                   collect(*n.second);
                 },
                 [&](const Stm::ExpStm& n) { collect(*n.exp); },
                 [&](const Stm::Output& n) { collect(*n.exp); },
                 [&](const Stm::Assign& n) {
                   collect(*n.target);
                   collect(*n.value);
                 },
                 [&](const Stm::If& n) {
                   collect(*n.cond);
                   collect(*n.then);
                 },
                 [&](const Stm::IfElse& n) {
                   collect(*n.cond);
                   collect(*n.then);
                   collect(*n.otherwise);
                 },
                 [&](const Stm::While& n) {
                   collect(*n.cond);
                   collect(*n.body);
                 },
                 [&](const Stm::FunDecl& n) {
                   functions_.emplace(s.sid, &s);
                   collect(*n.body);
                 },
                 [&](const Stm::Return& n) { collect(*n.exp); },
                 [&](const Stm::TryCatch& n) {
                   collect(*n.body);
                   collect(*n.handler);
                 },
                 [&](const Stm::Throw& n) { collect(*n.exp); },
                 [](const Stm::Nil&) {},
             },
             s.node);
}

/// Top-level statements of a program: the root with its Seq spine flattened.
inline std::vector<const Stm*> topLevelStatements(const Stm& root) {
  std::vector<const Stm*> out;
  const Stm* cur = &root;
  while (auto* seq = std::get_if<Stm::Seq>(&cur->node)) {
    out.push_back(seq->first.get());
    cur = seq->second.get();
  }
  out.push_back(cur);
  return out;
}

}  // namespace sdtl
