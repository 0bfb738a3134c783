#pragma once

#include <json.hpp>

#include "sdtl/ast.hpp"

namespace sdtl {

/// Debug dump of the id-annotated tree. Every node is
/// {"id", "kind", "children"}, plus "name"/"op"/"value"/"params" where the
/// node kind carries one.
class AstJson {
 public:
  using json = nlohmann::json;

  static json dump(const Program& p) { return of(p.root()); }

  static json of(const Stm& s) {
    json j = node(raw(s.sid), kindName(s));
    auto& kids = j["children"];
    std::visit(Overloaded{
                   [&](const Stm::Seq& n) {
                     kids.push_back(of(*n.first));
                     kids.push_back(of(*n.second));
                   },
                   [&](const Stm::ExpStm& n) { kids.push_back(of(*n.exp)); },
                   [&](const Stm::Output& n) { kids.push_back(of(*n.exp)); },
                   [&](const Stm::Assign& n) {
                     kids.push_back(of(*n.target));
                     kids.push_back(of(*n.value));
                   },
                   [&](const Stm::If& n) {
                     kids.push_back(of(*n.cond));
                     kids.push_back(of(*n.then));
                   },
                   [&](const Stm::IfElse& n) {
                     kids.push_back(of(*n.cond));
                     kids.push_back(of(*n.then));
                     kids.push_back(of(*n.otherwise));
                   },
                   [&](const Stm::While& n) {
                     kids.push_back(of(*n.cond));
                     kids.push_back(of(*n.body));
                   },
                   [&](const Stm::FunDecl& n) {
                     j["name"] = n.name;
                     j["params"] = n.params;
                     kids.push_back(of(*n.body));
                   },
                   [&](const Stm::Return& n) { kids.push_back(of(*n.exp)); },
                   [&](const Stm::TryCatch& n) {
                     j["name"] = n.var;
                     kids.push_back(of(*n.body));
                     kids.push_back(of(*n.handler));
                   },
                   [&](const Stm::Throw& n) { kids.push_back(of(*n.exp)); },
                   [](const Stm::Nil&) {},
               },
               s.node);
    return j;
  }

  static json of(const Exp& e) {
    json j = node(raw(e.eid), kindName(e));
    auto& kids = j["children"];
    auto args = [&](const std::vector<ExpPtr>& as) {
      for (auto& a : as) kids.push_back(of(*a));
    };
    std::visit(Overloaded{
                   [&](const Exp::Con& n) {
                     if (auto* b = std::get_if<bool>(&n.value)) {
                       j["value"] = *b;
                     } else {
                       j["value"] = std::get<Integer>(n.value).str();
                     }
                   },
                   [&](const Exp::LexpRef& n) { kids.push_back(of(*n.lexp)); },
                   [&](const Exp::Call& n) {
                     kids.push_back(of(*n.callee));
                     args(n.args);
                   },
                   [&](const Exp::MethodCall& n) {
                     j["name"] = n.member;
                     kids.push_back(of(*n.receiver));
                     args(n.args);
                   },
                   [&](const Exp::Binary& n) {
                     j["op"] = spelling(n.op);
                     kids.push_back(of(*n.lhs));
                     kids.push_back(of(*n.rhs));
                   },
                   [&](const Exp::Paren& n) { kids.push_back(of(*n.inner)); },
                   [&](const Exp::New& n) {
                     kids.push_back(of(*n.callee));
                     args(n.args);
                   },
                   [](const auto&) {},
               },
               e.node);
    return j;
  }

  static json of(const Lexp& l) {
    json j = node(raw(l.eid), kindName(l));
    std::visit(Overloaded{
                   [&](const Lexp::Var& v) { j["name"] = v.name; },
                   [&](const Lexp::Member& m) {
                     j["name"] = m.member;
                     j["children"].push_back(of(*m.object));
                   },
               },
               l.node);
    return j;
  }

 private:
  static json node(std::uint32_t id, const char* kind) {
    return json{{"id", id}, {"kind", kind}, {"children", json::array()}};
  }
};

}  // namespace sdtl
