#pragma once

#include <set>
#include <string>

#include "sdtl/ast.hpp"

namespace sdtl {

/// Renders a tree back to SDTL source. Statements whose sid is in `omit`
/// print as `nil`, which is how the shrinker deletes them.
class Printer {
 public:
  explicit Printer(std::set<Sid> omit = {}) : omit_(std::move(omit)) {}

  std::string print(const Program& p) { return stm(p.root(), 0) + "\n"; }

  std::string stm(const Stm& s, int depth) {
    if (omit_.count(s.sid)) return pad(depth) + "nil";
    return std::visit(
        Overloaded{
            [&](const Stm::Nil&) { return pad(depth) + "nil"; },
            [&](const Stm::Seq& n) {
              return stm(*n.first, depth) + ";\n" + stm(*n.second, depth);
            },
            [&](const Stm::ExpStm& n) { return pad(depth) + exp(*n.exp); },
            [&](const Stm::Output& n) { return pad(depth) + "output " + exp(*n.exp); },
            [&](const Stm::Assign& n) {
              return pad(depth) + lexp(*n.target) + " = " + exp(*n.value);
            },
            [&](const Stm::If& n) {
              return pad(depth) + "if (" + exp(*n.cond) + ") " + block(*n.then, depth);
            },
            [&](const Stm::IfElse& n) {
              return pad(depth) + "if (" + exp(*n.cond) + ") " + block(*n.then, depth) +
                     " else " + block(*n.otherwise, depth);
            },
            [&](const Stm::While& n) {
              return pad(depth) + "while (" + exp(*n.cond) + ") " + block(*n.body, depth);
            },
            [&](const Stm::FunDecl& n) {
              return pad(depth) + "function " + n.name + "(" + join(n.params) + ") " +
                     block(*n.body, depth);
            },
            [&](const Stm::Return& n) { return pad(depth) + "return " + exp(*n.exp); },
            [&](const Stm::TryCatch& n) {
              return pad(depth) + "try " + block(*n.body, depth) + " catch (" + n.var + ") " +
                     block(*n.handler, depth);
            },
            [&](const Stm::Throw& n) { return pad(depth) + "throw " + exp(*n.exp); },
        },
        s.node);
  }

  std::string exp(const Exp& e) {
    return std::visit(
        Overloaded{
            [&](const Exp::Con& n) -> std::string {
              if (auto* b = std::get_if<bool>(&n.value)) return *b ? "true" : "false";
              return std::get<Integer>(n.value).str();
            },
            [&](const Exp::LexpRef& n) { return lexp(*n.lexp); },
            [&](const Exp::Input&) -> std::string { return "input"; },
            [&](const Exp::Call& n) { return lexp(*n.callee) + "(" + args(n.args) + ")"; },
            [&](const Exp::MethodCall& n) {
              return postfixOperand(*n.receiver) + "." + n.member + "(" + args(n.args) + ")";
            },
            [&](const Exp::Binary& n) {
              int p = precedence(n.op);
              std::string lhs = exp(*n.lhs);
              std::string rhs = exp(*n.rhs);
              if (precedenceOf(*n.lhs) < p) lhs = "(" + lhs + ")";
              if (precedenceOf(*n.rhs) <= p) rhs = "(" + rhs + ")";
              return lhs + " " + spelling(n.op) + " " + rhs;
            },
            [&](const Exp::Paren& n) { return "(" + exp(*n.inner) + ")"; },
            [&](const Exp::Global&) -> std::string { return "global"; },
            [&](const Exp::This&) -> std::string { return "this"; },
            [&](const Exp::New& n) { return "new " + lexp(*n.callee) + "(" + args(n.args) + ")"; },
        },
        e.node);
  }

  std::string lexp(const Lexp& l) {
    if (auto* v = std::get_if<Lexp::Var>(&l.node)) return v->name;
    const auto& m = std::get<Lexp::Member>(l.node);
    return postfixOperand(*m.object) + "." + m.member;
  }

 private:
  static int precedence(BinOp op) {
    switch (op) {
      case BinOp::Gt:
      case BinOp::Lt:
      case BinOp::Eq: return 1;
      case BinOp::Add:
      case BinOp::Sub: return 2;
      case BinOp::Mul:
      case BinOp::Div: return 3;
    }
    return 0;
  }

  static int precedenceOf(const Exp& e) {
    if (auto* b = std::get_if<Exp::Binary>(&e.node)) return precedence(b->op);
    return 4;
  }

  std::string postfixOperand(const Exp& e) {
    std::string s = exp(e);
    bool atomic = !std::holds_alternative<Exp::Binary>(e.node) &&
                  !std::holds_alternative<Exp::New>(e.node);
    return atomic ? s : "(" + s + ")";
  }

  std::string block(const Stm& body, int depth) {
    return "{\n" + stm(body, depth + 1) + ";\n" + pad(depth) + "}";
  }

  std::string args(const std::vector<ExpPtr>& as) {
    std::string s;
    for (std::size_t k = 0; k < as.size(); ++k) {
      if (k) s += ", ";
      s += exp(*as[k]);
    }
    return s;
  }

  static std::string join(const std::vector<Ident>& ids) {
    std::string s;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (k) s += ", ";
      s += ids[k];
    }
    return s;
  }

  static std::string pad(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

  std::set<Sid> omit_;
};

inline std::string print(const Program& p) { return Printer().print(p); }

}  // namespace sdtl
