#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sdtl/sdtl.hpp"

namespace sdtl::testing {

inline std::string programText(const std::string& name) {
  std::ifstream in(std::string(SDTL_PROGRAMS_DIR) + "/" + name + ".sdtl");
  if (!in) throw std::runtime_error("missing program " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program program(const std::string& name) { return parse(programText(name)); }

inline std::vector<Integer> ints(std::initializer_list<long> xs) {
  std::vector<Integer> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

inline std::vector<Integer> outputOf(const std::string& name, std::initializer_list<long> inputs) {
  return concrete::runProgram(program(name), ints(inputs)).output();
}

/// A final environment rendered as id -> text of the abstract value.
using EnvText = std::map<std::string, std::string>;

inline EnvText envText(const abstract::AEnv& env) {
  EnvText out;
  for (const auto& [id, v] : env) out[id] = serialize::toText(v);
  return out;
}

inline std::set<EnvText> finalEnvs(const abstract::AnalysisResult& r) {
  std::set<EnvText> out;
  for (const auto& s : r.finals) out.insert(envText(s.env));
  return out;
}

/// Sid of the declaration of function `name`.
inline Sid functionSid(const Program& p, const std::string& name) {
  for (const auto& [n, s] : p.functions()) {
    if (std::get<Stm::FunDecl>(s->node).name == name) return n;
  }
  throw std::runtime_error("no function " + name);
}

/// All statement kinds, counted over a parsed program.
inline void countKinds(const Stm& s, std::map<std::string, int>& out) {
  out[kindName(s)]++;
  std::visit(Overloaded{
                 [&](const Stm::Seq& n) {
                   countKinds(*n.first, out);
                   countKinds(*n.second, out);
                 },
                 [&](const Stm::If& n) { countKinds(*n.then, out); },
                 [&](const Stm::IfElse& n) {
                   countKinds(*n.then, out);
                   countKinds(*n.otherwise, out);
                 },
                 [&](const Stm::While& n) { countKinds(*n.body, out); },
                 [&](const Stm::FunDecl& n) { countKinds(*n.body, out); },
                 [&](const Stm::TryCatch& n) {
                   countKinds(*n.body, out);
                   countKinds(*n.handler, out);
                 },
                 [](const auto&) {},
             },
             s.node);
}

/// Every node id of a program, in dump order.
inline void collectIds(const nlohmann::json& node, std::vector<std::uint32_t>& out) {
  out.push_back(node["id"].get<std::uint32_t>());
  for (const auto& c : node["children"]) collectIds(c, out);
}

inline std::vector<std::uint32_t> ids(const Program& p) {
  std::vector<std::uint32_t> out;
  collectIds(AstJson::dump(p), out);
  return out;
}

inline const std::vector<std::string>& corpus() {
  static const std::vector<std::string> names = {
      "fact",    "fig1",       "currying",   "while",      "currying_loop", "objects",
      "fact_side_effect", "exceptions", "tryorerror", "div0", "cycle"};
  return names;
}

}  // namespace sdtl::testing
