#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdtl/abstract.hpp"
#include "sdtl/concrete.hpp"

// JSON and text renderings of values and states. JSON objects are key-sorted
// and state sets are ordered by their canonical dump, so output is stable.

namespace sdtl::serialize {

using json = nlohmann::json;

inline json integer(const Integer& i) {
  if (i >= std::numeric_limits<std::int64_t>::min() && i <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(i);
  }
  return i.str();
}

inline json toJson(const abstract::AVal& v) {
  return std::visit(Overloaded{
                        [](const abstract::TNum&) -> json { return "Num"; },
                        [](const abstract::TBool&) -> json { return "Bool"; },
                        [](const abstract::AObjRef& r) -> json { return {{"obj", r.site}}; },
                        [](const abstract::AFunPtr& f) -> json {
                          return {{"fun", {raw(f.sid), f.count, raw(f.anchor)}}};
                        },
                        [](const abstract::VoidVal&) -> json { return "void"; },
                    },
                    v.v);
}

inline json toJson(const concrete::CValue& v);

template <class V>
json slot(const std::optional<V>& v) {
  return v ? toJson(*v) : json("void");
}

inline json toJson(const abstract::AEnv& env) {
  json j = json::object();
  for (const auto& [id, v] : env) j[id] = toJson(v);
  return j;
}

inline json toJson(const abstract::AState& s) {
  json objmem = json::object();
  for (const auto& [site, members] : s.objMem) objmem[std::to_string(site)] = toJson(members);
  json curried = json::array();
  for (const auto& [key, lists] : s.curried) {
    json ls = json::array();
    for (const auto& list : lists) {
      json l = json::array();
      for (const auto& v : list) l.push_back(toJson(v));
      ls.push_back(l);
    }
    curried.push_back({{"key", {raw(key.sid), key.count, raw(key.anchor)}}, {"lists", ls}});
  }
  return {{"env", toJson(s.env)}, {"objmem", objmem},       {"this", s.self},
          {"curried", curried},   {"ret", slot(s.ret)}, {"ex", slot(s.ex)}};
}

inline json toJson(const abstract::Diagnostic& d) {
  return {{"node", d.node}, {"message", d.message}};
}

inline json toJson(const concrete::CValue& v) {
  return std::visit(Overloaded{
                        [](const Integer& i) -> json { return integer(i); },
                        [](bool b) -> json { return b; },
                        [](const concrete::ObjRef& r) -> json { return {{"obj", r.id}}; },
                        [](const concrete::FunPtr& f) -> json {
                          json curried = json::array();
                          for (const auto& c : f.curried) curried.push_back(toJson(c));
                          return {{"fun", {raw(f.sid), curried}}};
                        },
                        [](const concrete::VoidVal&) -> json { return "void"; },
                    },
                    v.v);
}

inline json toJson(const concrete::Env& env) {
  json j = json::object();
  for (const auto& [id, v] : env) j[id] = toJson(v);
  return j;
}

inline json toJson(const concrete::CState& s) {
  json objmem = json::object();
  for (const auto& [id, o] : s.objMem) objmem[std::to_string(id)] = toJson(o.members);
  json input = json::array();
  for (const auto& i : s.io.input) input.push_back(integer(i));
  json output = json::array();
  for (const auto& i : s.io.output) output.push_back(integer(i));
  return {{"env", toJson(s.env)}, {"objmem", objmem}, {"this", s.self}, {"ret", slot(s.ret)},
          {"ex", slot(s.ex)},     {"input", input},   {"output", output}};
}

/// States as a JSON array sorted by canonical serialization.
template <class State>
json statesJson(const std::set<State>& states) {
  std::vector<json> items;
  for (const auto& s : states) items.push_back(toJson(s));
  std::sort(items.begin(), items.end(),
            [](const json& a, const json& b) { return a.dump() < b.dump(); });
  return json(items);
}

// ---- text ----------------------------------------------------------------

inline std::string toText(const abstract::AVal& v) {
  return std::visit(Overloaded{
                        [](const abstract::TNum&) -> std::string { return "Num"; },
                        [](const abstract::TBool&) -> std::string { return "Bool"; },
                        [](const abstract::AObjRef& r) { return "Obj " + std::to_string(r.site); },
                        [](const abstract::AFunPtr& f) {
                          return "<" + std::to_string(raw(f.sid)) + "," + std::to_string(f.count) +
                                 "," + std::to_string(raw(f.anchor)) + ">";
                        },
                        [](const abstract::VoidVal&) -> std::string { return "void"; },
                    },
                    v.v);
}

inline std::string toText(const concrete::CValue& v) {
  return std::visit(Overloaded{
                        [](const Integer& i) { return i.str(); },
                        [](bool b) -> std::string { return b ? "true" : "false"; },
                        [](const concrete::ObjRef& r) { return "Obj " + std::to_string(r.id); },
                        [](const concrete::FunPtr& f) {
                          std::string s = "<" + std::to_string(raw(f.sid)) + ",[";
                          for (std::size_t k = 0; k < f.curried.size(); ++k) {
                            if (k) s += ",";
                            s += toText(f.curried[k]);
                          }
                          return s + "]>";
                        },
                        [](const concrete::VoidVal&) -> std::string { return "void"; },
                    },
                    v.v);
}

template <class Map>
std::string mapText(const Map& m) {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : m) {
    if (!first) s += ", ";
    first = false;
    s += k + ": " + toText(v);
  }
  return s + "}";
}

inline std::string toText(const concrete::CValue& v);

template <class V>
std::string slotText(const std::optional<V>& v) {
  return v ? toText(*v) : "void";
}

/// Multi-line rendering of an abstract state, indented by two spaces.
inline std::string toText(const abstract::AState& s) {
  std::string out = "  env: " + mapText(s.env) + "\n  objmem:";
  for (const auto& [site, members] : s.objMem) {
    out += " " + std::to_string(site) + " -> " + mapText(members) + ";";
  }
  out += "\n  this: " + std::to_string(s.self) + "\n  curried:";
  if (s.curried.empty()) out += " none";
  for (const auto& [key, lists] : s.curried) {
    out += " <" + std::to_string(raw(key.sid)) + "," + std::to_string(key.count) + "," +
           std::to_string(raw(key.anchor)) + "> -> {";
    bool firstList = true;
    for (const auto& list : lists) {
      if (!firstList) out += ", ";
      firstList = false;
      out += "[";
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (k) out += ",";
        out += toText(list[k]);
      }
      out += "]";
    }
    out += "};";
  }
  out += "\n  ret: " + slotText(s.ret) + "\n  ex: " + slotText(s.ex) + "\n";
  return out;
}

/// One line of a concrete run trace.
inline std::string traceLine(Sid n, const concrete::CState& s) {
  return "sid=" + std::to_string(raw(n)) + " env=" + mapText(s.env) + " ex=" + slotText(s.ex) +
         " ret=" + slotText(s.ret);
}

}  // namespace sdtl::serialize
