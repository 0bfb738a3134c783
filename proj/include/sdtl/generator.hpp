#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sdtl/ast.hpp"
#include "sdtl/parser.hpp"
#include "sdtl/printer.hpp"

// Random well-formed SDTL programs for differential testing. Generation is
// typed so that most programs run without type errors, loops count down a
// private counter so concrete runs terminate, and `input` is only read at
// top level outside loops so a fixed-length input vector suffices.

namespace sdtl::gen {

class Generator {
 public:
  Generator(std::uint64_t seed, std::size_t size) : rng_(seed), size_(size < 1 ? 1 : size) {}

  std::string program() {
    std::string out;
    prelude(out);
    Scope top;
    top.allowInput = true;
    std::size_t n = 1 + pick(size_);
    for (std::size_t k = 0; k < n; ++k) out += statement(top, 0) + ";\n";
    return out;
  }

  static constexpr std::size_t kMaxInputs = 4;

 private:
  struct NumFun {
    std::string name;
    std::size_t arity;
  };
  struct Partial {
    std::string name;
    std::size_t remaining;
  };
  struct Scope {
    std::vector<std::string> nums;
    std::vector<std::string> bools;
    std::vector<std::string> objs;
    std::vector<Partial> partials;
    bool allowInput = false;
    bool inFunction = false;
    bool nested = false;
  };

  // ---- randomness -------------------------------------------------------

  std::size_t pick(std::size_t n) {
    return n == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  bool chance(int percent) { return static_cast<int>(pick(100)) < percent; }
  template <class C>
  const auto& oneOf(const C& c) {
    return c[pick(c.size())];
  }
  std::string fresh(const char* prefix) { return prefix + std::to_string(++counter_); }
  std::string literal() { return std::to_string(pick(10)); }

  // ---- prelude ----------------------------------------------------------

  void prelude(std::string& out) {
    std::size_t funs = 1 + pick(3);
    for (std::size_t k = 0; k < funs; ++k) {
      out += numericFunction() + ";\n";
      out += "global." + funs_.back().name + " = " + funs_.back().name + ";\n";
    }
    if (chance(50)) {
      recursive_ = fresh("r");
      out += "function " + recursive_ + "(f, n) {\n  if (n > 0) { return f(f, n - 1) + n; };\n"
             "  return 0;\n}\n";
    }
    if (chance(70)) {
      method_ = fresh("m");
      ctor_ = fresh("C");
      out += "function " + method_ + "(x) {\n  return this.val + x;\n};\n";
      out += "global." + method_ + " = " + method_ + ";\n";
      out += "function " + ctor_ + "(v) {\n  this.val = v;\n  this.get = global." + method_ + ";\n};\n";
      if (chance(60)) {
        maker_ = fresh("mk");
        out += "global." + ctor_ + " = " + ctor_ + ";\n";
        out += "function " + maker_ + "(v) {\n  return new global." + ctor_ + "(v);\n};\n";
      }
    }
  }

  std::string numericFunction() {
    NumFun f{fresh("f"), 1 + pick(3)};
    Scope body;
    body.inFunction = true;
    std::string params;
    for (std::size_t k = 0; k < f.arity; ++k) {
      std::string p = std::string(1, static_cast<char>('a' + k));
      body.nums.push_back(p);
      params += (k ? ", " : "") + p;
    }
    std::string text = "function " + f.name + "(" + params + ") {\n";
    std::size_t n = pick(4);
    for (std::size_t k = 0; k < n; ++k) text += functionStatement(body, 1) + ";\n";
    text += "  return " + num(body, 2) + ";\n}";
    funs_.push_back(f);
    return text;
  }

  std::string functionStatement(Scope& s, int depth) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    switch (pick(6)) {
      case 0: {
        std::string g = "global." + fresh("s");
        std::string e = num(s, 2);
        s.nums.push_back(g);
        return pad + g + " = " + e;
      }
      case 1:
        return pad + "if (" + boolean(s, 2) + ") { return " + num(s, 2) + "; }";
      case 2:
        return pad + "if (" + boolean(s, 2) + ") { throw " + num(s, 2) + "; }";
      default:
        return statement(s, depth);
    }
  }

  // ---- statements -------------------------------------------------------

  std::string statement(Scope& s, int depth) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    bool deep = depth >= 3;
    switch (pick(16)) {
      case 0:
      case 1: {
        std::string e = num(s, 3);
        return pad + assignNum(s, e);
      }
      case 2: {
        std::string e = boolean(s, 3);
        if (!s.bools.empty() && chance(40)) return pad + oneOf(s.bools) + " = " + e;
        std::string v = fresh("b");
        if (!s.nested) s.bools.push_back(v);
        return pad + v + " = " + e;
      }
      case 3:
      case 4:
        return pad + "output " + (chance(75) ? num(s, 3) : boolean(s, 2));
      case 5:
        if (deep) return pad + "output " + num(s, 1);
        return pad + "if (" + boolean(s, 2) + ") " + block(s, depth);
      case 6:
        if (deep) return pad + "nil";
        return pad + "if (" + boolean(s, 2) + ") " + block(s, depth) + " else " + block(s, depth);
      case 7: {
        if (deep) return pad + "nil";
        std::string c = fresh("c");
        Scope inner = s;
        inner.nested = true;
        inner.allowInput = false;
        std::string body = pad + "  " + c + " = " + c + " - 1;\n";
        std::size_t n = 1 + pick(2);
        for (std::size_t k = 0; k < n; ++k) body += statement(inner, depth + 1) + ";\n";
        return pad + c + " = " + std::to_string(pick(4)) + ";\n" + pad + "while (" + c +
               " > 0) {\n" + body + pad + "}";
      }
      case 8: {
        if (deep || s.inFunction) return pad + "nil";
        std::string e = fresh("e");
        Scope body = s;
        body.nested = true;
        std::string tryBlock = "{\n";
        std::size_t n = 1 + pick(2);
        for (std::size_t k = 0; k < n; ++k) tryBlock += statement(body, depth + 1) + ";\n";
        tryBlock += pad + "  if (" + boolean(body, 2) + ") { throw " + num(body, 2) + "; };\n" + pad + "}";
        Scope handler = s;
        handler.nested = true;
        handler.nums.push_back(e);
        return pad + "try " + tryBlock + " catch (" + e + ") {\n" + pad + "  output " + e + ";\n" +
               statement(handler, depth + 1) + ";\n" + pad + "}";
      }
      case 9: {
        if (funs_.empty() || s.nested) return pad + "output " + num(s, 2);
        const NumFun& f = oneOf(funs_);
        if (f.arity < 2) return pad + "output " + callee(s, f) + "(" + args(s, 1) + ")";
        std::size_t given = 1 + pick(f.arity - 1);
        std::string p = fresh("p");
        std::string text = pad + p + " = " + callee(s, f) + "(" + args(s, given) + ")";
        s.partials.push_back({p, f.arity - given});
        return text;
      }
      case 10: {
        if (ctor_.empty() || s.nested || s.inFunction) return pad + "output " + num(s, 2);
        std::string o = fresh("o");
        std::string e = num(s, 2);
        s.objs.push_back(o);
        if (!maker_.empty() && chance(50)) return pad + o + " = " + maker_ + "(" + e + ")";
        return pad + o + " = new " + ctor_ + "(" + e + ")";
      }
      case 11:
        if (s.objs.empty()) return pad + "global." + fresh("g") + " = " + num(s, 2);
        return pad + oneOf(s.objs) + ".val = " + num(s, 2);
      case 12:
        if (s.objs.empty()) return pad + "output " + num(s, 2);
        return pad + oneOf(s.objs) + "." + fresh("x") + " = " + boolean(s, 2);
      case 13: {
        std::string g = "global." + fresh("g");
        std::string e = num(s, 2);
        if (!s.nested) s.nums.push_back(g);
        return pad + g + " = " + e;
      }
      case 14:
        if (funs_.empty()) return pad + "nil";
        return pad + call(s);
      default:
        if (chance(15) && !s.nested && !s.inFunction) return pad + "throw " + num(s, 1);
        return pad + "nil";
    }
  }

  std::string assignNum(Scope& s, const std::string& e) {
    std::vector<std::string> plain;
    for (const auto& v : s.nums) {
      if (v.find('.') == std::string::npos && v.size() > 1) plain.push_back(v);
    }
    if (!plain.empty() && chance(40)) return oneOf(plain) + " = " + e;
    std::string v = fresh("v");
    if (!s.nested) s.nums.push_back(v);
    return v + " = " + e;
  }

  std::string block(Scope& s, int depth) {
    Scope inner = s;
    inner.nested = true;
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    std::string body = "{\n";
    std::size_t n = 1 + pick(2);
    for (std::size_t k = 0; k < n; ++k) {
      body += (s.inFunction ? functionStatement(inner, depth + 1) : statement(inner, depth + 1)) + ";\n";
    }
    return body + pad + "}";
  }

  // ---- expressions ------------------------------------------------------

  std::string args(Scope& s, std::size_t n) {
    std::string out;
    for (std::size_t k = 0; k < n; ++k) out += (k ? ", " : "") + num(s, 1);
    return out;
  }

  std::string call(Scope& s) {
    const NumFun& f = oneOf(funs_);
    return callee(s, f) + "(" + args(s, f.arity) + ")";
  }

  /// Function bodies only see their parameters, so they reach other
  /// functions through the global object.
  std::string callee(const Scope& s, const NumFun& f) const {
    return s.inFunction ? "global." + f.name : f.name;
  }

  std::string num(Scope& s, int budget) {
    if (budget <= 0) return atomNum(s);
    switch (pick(9)) {
      case 0:
      case 1: {
        static const char* ops[] = {"+", "-", "*"};
        return num(s, budget - 1) + " " + ops[pick(3)] + " " + num(s, budget - 1);
      }
      case 2: return "(" + num(s, budget - 1) + ")";
      case 3: return num(s, budget - 1) + " / " + std::to_string(1 + pick(5));
      case 4:
        if (!funs_.empty()) return call(s);
        break;
      case 5:
        if (!recursive_.empty()) return recursive_ + "(" + recursive_ + ", " + std::to_string(pick(5)) + ")";
        break;
      case 6:
        if (!s.objs.empty()) {
          const auto& o = oneOf(s.objs);
          return chance(50) ? o + ".val" : o + ".get(" + num(s, budget - 1) + ")";
        }
        break;
      case 7:
        for (const auto& p : s.partials) {
          if (chance(60)) return p.name + "(" + args(s, p.remaining) + ")";
        }
        break;
      default: break;
    }
    return atomNum(s);
  }

  std::string atomNum(Scope& s) {
    if (s.allowInput && !s.nested && inputs_ < kMaxInputs && chance(20)) {
      ++inputs_;
      return "input";
    }
    if (!s.nums.empty() && chance(60)) return oneOf(s.nums);
    if (chance(10)) return "-" + literal();
    return literal();
  }

  std::string boolean(Scope& s, int budget) {
    switch (pick(6)) {
      case 0: return chance(50) ? "true" : "false";
      case 1:
        if (!s.bools.empty()) return oneOf(s.bools);
        [[fallthrough]];
      case 2: return num(s, budget - 1) + " < " + num(s, budget - 1);
      case 3: return num(s, budget - 1) + " > " + num(s, budget - 1);
      case 4: return num(s, budget - 1) + " == " + num(s, budget - 1);
      default:
        if (budget > 0) return "(" + boolean(s, budget - 1) + ") == " + (chance(50) ? "true" : "false");
        return "true";
    }
  }

  std::mt19937_64 rng_;
  std::size_t size_;
  std::size_t counter_ = 0;
  std::size_t inputs_ = 0;
  std::vector<NumFun> funs_;
  std::string recursive_;
  std::string ctor_;
  std::string method_;
  std::string maker_;
};

/// `count` programs from `seed`; program k uses seed + k, so each can be
/// regenerated on its own.
inline std::vector<std::string> generatePrograms(std::uint64_t seed, std::size_t count,
                                                 std::size_t sizeBound) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(Generator(seed + k, sizeBound).program());
  return out;
}

/// `count` input vectors of small integers, each long enough for any
/// generated program.
inline std::vector<std::vector<Integer>> inputVectors(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(-5, 12);
  std::vector<std::vector<Integer>> out(count);
  for (auto& v : out) {
    for (std::size_t k = 0; k < Generator::kMaxInputs; ++k) v.emplace_back(d(rng));
  }
  return out;
}

/// Sids of every statement under `s` that is neither a sequence nor `nil`,
/// outermost first.
inline void deletable(const Stm& s, std::vector<Sid>& out) {
  std::visit(Overloaded{
                 [&](const Stm::Seq& n) {
                   deletable(*n.first, out);
                   deletable(*n.second, out);
                 },
                 [&](const Stm::Nil&) {},
                 [&](const auto& n) {
                   out.push_back(s.sid);
                   using N = std::decay_t<decltype(n)>;
                   if constexpr (std::is_same_v<N, Stm::If>) deletable(*n.then, out);
                   if constexpr (std::is_same_v<N, Stm::IfElse>) {
                     deletable(*n.then, out);
                     deletable(*n.otherwise, out);
                   }
                   if constexpr (std::is_same_v<N, Stm::While> || std::is_same_v<N, Stm::FunDecl>) {
                     deletable(*n.body, out);
                   }
                   if constexpr (std::is_same_v<N, Stm::TryCatch>) {
                     deletable(*n.body, out);
                     deletable(*n.handler, out);
                   }
                 },
             },
             s.node);
}

/// Greedy shrinking: repeatedly replace single statements by `nil` while the
/// program still parses and `failing` still holds.
inline std::string shrink(const std::string& source,
                          const std::function<bool(const std::string&)>& failing) {
  std::string current = source;
  bool progress = true;
  while (progress) {
    progress = false;
    Program p = parse(current);
    std::vector<Sid> order;
    deletable(p.root(), order);
    for (Sid sid : order) {
      std::string candidate = Printer({sid}).print(p);
      if (candidate == current) continue;
      try {
        parse(candidate);
      } catch (const SyntaxError&) {
        continue;
      }
      if (failing(candidate)) {
        current = candidate;
        progress = true;
        break;
      }
    }
  }
  return current;
}

}  // namespace sdtl::gen
