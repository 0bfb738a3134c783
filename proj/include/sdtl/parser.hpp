#pragma once

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdtl/ast.hpp"
#include "sdtl/errors.hpp"

namespace sdtl {

namespace lex {

enum class Tok {
  Ident,
  Int,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Dot,
  Assign,
  EqEq,
  Plus,
  Minus,
  Star,
  Slash,
  Less,
  Greater,
  // keywords
  KwNil,
  KwOutput,
  KwInput,
  KwIf,
  KwElse,
  KwWhile,
  KwFunction,
  KwReturn,
  KwTrue,
  KwFalse,
  KwGlobal,
  KwThis,
  KwNew,
  KwTry,
  KwCatch,
  KwThrow,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

inline Tok keyword(std::string_view w) {
  static const std::pair<std::string_view, Tok> table[] = {
      {"nil", Tok::KwNil},       {"output", Tok::KwOutput}, {"input", Tok::KwInput},
      {"if", Tok::KwIf},         {"else", Tok::KwElse},     {"while", Tok::KwWhile},
      {"function", Tok::KwFunction}, {"return", Tok::KwReturn}, {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},   {"global", Tok::KwGlobal}, {"this", Tok::KwThis},
      {"new", Tok::KwNew},       {"try", Tok::KwTry},       {"catch", Tok::KwCatch},
      {"throw", Tok::KwThrow},
  };
  for (auto& [k, t] : table)
    if (k == w) return t;
  return Tok::Ident;
}

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string word;
      while (i < src.size() && std::isalnum(static_cast<unsigned char>(src[i]))) {
        word += src[i];
        advance();
      }
      out.push_back({keyword(word), word, pos});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        digits += src[i];
        advance();
      }
      if (i < src.size() && std::isalpha(static_cast<unsigned char>(src[i]))) {
        throw SyntaxError(line, col, "malformed number literal");
      }
      out.push_back({Tok::Int, digits, pos});
      continue;
    }
    Tok kind;
    std::string text(1, c);
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semi; break;
      case '.': kind = Tok::Dot; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '<': kind = Tok::Less; break;
      case '>': kind = Tok::Greater; break;
      case '=':
        if (i + 1 < src.size() && src[i + 1] == '=') {
          advance();
          kind = Tok::EqEq;
          text = "==";
        } else {
          kind = Tok::Assign;
        }
        break;
      default:
        throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    }
    advance();
    out.push_back({kind, text, pos});
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

}  // namespace lex

namespace detail {

class Parser {
 public:
  explicit Parser(std::vector<lex::Token> toks) : toks_(std::move(toks)) {}

  StmPtr program() {
    auto root = statements(lex::Tok::End);
    expect(lex::Tok::End, "end of input");
    return root;
  }

 private:
  using Tok = lex::Tok;

  const lex::Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  const lex::Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  const lex::Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return take();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.pos.line, t.pos.column, msg + ", found " + found);
  }

  static StmPtr makeStm(SourcePos pos, auto node) {
    auto s = std::make_unique<Stm>();
    s->pos = pos;
    s->node = std::move(node);
    return s;
  }
  static ExpPtr makeExp(SourcePos pos, auto node) {
    auto e = std::make_unique<Exp>();
    e->pos = pos;
    e->node = std::move(node);
    return e;
  }
  static LexpPtr makeLexp(SourcePos pos, auto node) {
    auto l = std::make_unique<Lexp>();
    l->pos = pos;
    l->node = std::move(node);
    return l;
  }

  // A statement list: `;` separates statements, and may be omitted after a
  // statement that ends with a block. An empty list is Nil; a single statement
  // stands alone; longer lists right-associate into Seq.
  StmPtr statements(Tok terminator) {
    SourcePos start = peek().pos;
    std::vector<StmPtr> list;
    while (accept(Tok::Semi)) {
    }
    while (!at(terminator) && !at(Tok::End)) {
      auto s = statement();
      list.push_back(std::move(s));
      if (at(Tok::Semi)) {
        while (accept(Tok::Semi)) {
        }
        continue;
      }
      if (toks_[pos_ - 1].kind == Tok::RBrace) continue;
      if (at(terminator) || at(Tok::End)) break;
      fail("expected ';'");
    }
    if (list.empty()) return makeStm(start, Stm::Nil{});
    StmPtr tail = std::move(list.back());
    list.pop_back();
    while (!list.empty()) {
      auto head = std::move(list.back());
      list.pop_back();
      SourcePos p = head->pos;
      tail = makeStm(p, Stm::Seq{std::move(head), std::move(tail)});
    }
    return tail;
  }

  StmPtr block() {
    expect(Tok::LBrace, "'{'");
    auto body = statements(Tok::RBrace);
    expect(Tok::RBrace, "'}'");
    return body;
  }

  StmPtr statement() {
    SourcePos pos = peek().pos;
    switch (peek().kind) {
      case Tok::KwNil:
        take();
        return makeStm(pos, Stm::Nil{});
      case Tok::KwOutput:
        take();
        return makeStm(pos, Stm::Output{expression()});
      case Tok::KwReturn:
        take();
        return makeStm(pos, Stm::Return{expression()});
      case Tok::KwThrow:
        take();
        return makeStm(pos, Stm::Throw{expression()});
      case Tok::KwIf: {
        take();
        expect(Tok::LParen, "'('");
        auto cond = expression();
        expect(Tok::RParen, "')'");
        auto then = block();
        if (accept(Tok::KwElse)) {
          auto otherwise = block();
          return makeStm(pos, Stm::IfElse{std::move(cond), std::move(then), std::move(otherwise)});
        }
        return makeStm(pos, Stm::If{std::move(cond), std::move(then)});
      }
      case Tok::KwWhile: {
        take();
        expect(Tok::LParen, "'('");
        auto cond = expression();
        expect(Tok::RParen, "')'");
        return makeStm(pos, Stm::While{std::move(cond), block()});
      }
      case Tok::KwFunction: {
        take();
        Ident name = expect(Tok::Ident, "function name").text;
        expect(Tok::LParen, "'('");
        std::vector<Ident> params;
        std::set<Ident> seen;
        if (!at(Tok::RParen)) {
          do {
            const auto& t = expect(Tok::Ident, "parameter name");
            if (!seen.insert(t.text).second) {
              throw SyntaxError(t.pos.line, t.pos.column,
                                "duplicate parameter name '" + t.text + "' in function '" +
                                    name + "'");
            }
            params.push_back(t.text);
          } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        auto body = block();
        return makeStm(pos, Stm::FunDecl{std::move(name), std::move(params), std::move(body)});
      }
      case Tok::KwTry: {
        take();
        auto body = block();
        expect(Tok::KwCatch, "'catch'");
        expect(Tok::LParen, "'('");
        Ident var = expect(Tok::Ident, "exception variable").text;
        expect(Tok::RParen, "')'");
        auto handler = block();
        return makeStm(pos, Stm::TryCatch{std::move(body), std::move(var), std::move(handler)});
      }
      default:
        break;
    }
    auto e = expression();
    if (at(Tok::Assign)) {
      const auto& eq = take();
      auto* ref = std::get_if<Exp::LexpRef>(&e->node);
      if (!ref) throw SyntaxError(eq.pos.line, eq.pos.column, "invalid assignment target");
      auto target = std::move(ref->lexp);
      return makeStm(pos, Stm::Assign{std::move(target), expression()});
    }
    return makeStm(pos, Stm::ExpStm{std::move(e)});
  }

  // Precedence: {*,/} > {+,-} > {>,<,==}; all left-associative.
  ExpPtr expression() {
    auto lhs = additive();
    while (at(Tok::Less) || at(Tok::Greater) || at(Tok::EqEq)) {
      auto op = take();
      BinOp b = op.kind == Tok::Less ? BinOp::Lt : op.kind == Tok::Greater ? BinOp::Gt : BinOp::Eq;
      SourcePos p = lhs->pos;
      lhs = makeExp(p, Exp::Binary{b, std::move(lhs), additive()});
    }
    return lhs;
  }

  ExpPtr additive() {
    auto lhs = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp b = take().kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      SourcePos p = lhs->pos;
      lhs = makeExp(p, Exp::Binary{b, std::move(lhs), multiplicative()});
    }
    return lhs;
  }

  ExpPtr multiplicative() {
    auto lhs = unary();
    while (at(Tok::Star) || at(Tok::Slash)) {
      BinOp b = take().kind == Tok::Star ? BinOp::Mul : BinOp::Div;
      SourcePos p = lhs->pos;
      lhs = makeExp(p, Exp::Binary{b, std::move(lhs), unary()});
    }
    return lhs;
  }

  // Unary minus is sugar: `-E` is `0 - E`.
  ExpPtr unary() {
    if (at(Tok::Minus)) {
      SourcePos pos = take().pos;
      auto zero = makeExp(pos, Exp::Con{Integer(0)});
      return makeExp(pos, Exp::Binary{BinOp::Sub, std::move(zero), unary()});
    }
    return postfix();
  }

  std::vector<ExpPtr> arguments() {
    expect(Tok::LParen, "'('");
    std::vector<ExpPtr> args;
    if (!at(Tok::RParen)) {
      do {
        args.push_back(expression());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    return args;
  }

  ExpPtr postfix() {
    auto e = primary();
    for (;;) {
      if (at(Tok::Dot)) {
        take();
        const auto& name = expect(Tok::Ident, "member name");
        SourcePos p = e->pos;
        if (at(Tok::LParen)) {
          auto args = arguments();
          e = makeExp(p, Exp::MethodCall{std::move(e), name.text, std::move(args)});
        } else {
          auto member = makeLexp(p, Lexp::Member{std::move(e), name.text});
          e = makeExp(p, Exp::LexpRef{std::move(member)});
        }
        continue;
      }
      if (at(Tok::LParen)) {
        auto* ref = std::get_if<Exp::LexpRef>(&e->node);
        if (!ref || !std::holds_alternative<Lexp::Var>(ref->lexp->node)) {
          fail("only a name or a member can be called");
        }
        SourcePos p = e->pos;
        auto callee = std::move(ref->lexp);
        e = makeExp(p, Exp::Call{std::move(callee), arguments()});
        continue;
      }
      return e;
    }
  }

  ExpPtr primary() {
    const auto& t = peek();
    SourcePos pos = t.pos;
    switch (t.kind) {
      case Tok::Int: {
        Integer v(take().text);
        return makeExp(pos, Exp::Con{std::move(v)});
      }
      case Tok::KwTrue:
        take();
        return makeExp(pos, Exp::Con{true});
      case Tok::KwFalse:
        take();
        return makeExp(pos, Exp::Con{false});
      case Tok::KwInput:
        take();
        return makeExp(pos, Exp::Input{});
      case Tok::KwGlobal:
        take();
        return makeExp(pos, Exp::Global{});
      case Tok::KwThis:
        take();
        return makeExp(pos, Exp::This{});
      case Tok::LParen: {
        take();
        auto inner = expression();
        expect(Tok::RParen, "')'");
        return makeExp(pos, Exp::Paren{std::move(inner)});
      }
      case Tok::Ident: {
        auto var = makeLexp(pos, Lexp::Var{take().text});
        return makeExp(pos, Exp::LexpRef{std::move(var)});
      }
      case Tok::KwNew: {
        take();
        LexpPtr callee;
        if (at(Tok::KwGlobal) || at(Tok::KwThis)) {
          auto headPos = peek().pos;
          bool global = take().kind == Tok::KwGlobal;
          ExpPtr head = global ? makeExp(headPos, Exp::Global{}) : makeExp(headPos, Exp::This{});
          expect(Tok::Dot, "'.'");
          const auto& m = expect(Tok::Ident, "member name");
          callee = makeLexp(headPos, Lexp::Member{std::move(head), m.text});
        } else {
          const auto& first = expect(Tok::Ident, "constructor name");
          callee = makeLexp(first.pos, Lexp::Var{first.text});
        }
        while (at(Tok::Dot)) {
          take();
          const auto& m = expect(Tok::Ident, "member name");
          auto obj = makeExp(callee->pos, Exp::LexpRef{std::move(callee)});
          callee = makeLexp(obj->pos, Lexp::Member{std::move(obj), m.text});
        }
        auto args = arguments();
        return makeExp(pos, Exp::New{std::move(callee), std::move(args)});
      }
      default:
        fail("expected an expression");
    }
  }

  std::vector<lex::Token> toks_;
  std::size_t pos_ = 0;
};

// Ids are handed out left to right, each node numbered when the traversal
// first reaches it. Seq nodes are glue: they take their id only after both
// children, so the first statement of a program is always node 1.
class Numbering {
 public:
  std::uint32_t next = 1;

  void visit(Stm& s) {
    if (auto* seq = std::get_if<Stm::Seq>(&s.node)) {
      visit(*seq->first);
      visit(*seq->second);
      s.sid = Sid{next++};
      return;
    }
    s.sid = Sid{next++};
    std::visit(Overloaded{
                   [&](Stm::ExpStm& n) { visit(*n.exp); },
                   [&](Stm::Output& n) { visit(*n.exp); },
                   [&](Stm::Assign& n) {
                     visit(*n.target);
                     visit(*n.value);
                   },
                   [&](Stm::If& n) {
                     visit(*n.cond);
                     visit(*n.then);
                   },
                   [&](Stm::IfElse& n) {
                     visit(*n.cond);
                     visit(*n.then);
                     visit(*n.otherwise);
                   },
                   [&](Stm::While& n) {
                     visit(*n.cond);
                     visit(*n.body);
                   },
                   [&](Stm::FunDecl& n) { visit(*n.body); },
                   [&](Stm::Return& n) { visit(*n.exp); },
                   [&](Stm::TryCatch& n) {
                     visit(*n.body);
                     visit(*n.handler);
                   },
                   [&](Stm::Throw& n) { visit(*n.exp); },
                   [](auto&) {},
               },
               s.node);
  }

  void visit(Exp& e) {
    e.eid = Eid{next++};
    std::visit(Overloaded{
                   [&](Exp::LexpRef& n) { visit(*n.lexp); },
                   [&](Exp::Call& n) {
                     visit(*n.callee);
                     for (auto& a : n.args) visit(*a);
                   },
                   [&](Exp::MethodCall& n) {
                     visit(*n.receiver);
                     for (auto& a : n.args) visit(*a);
                   },
                   [&](Exp::Binary& n) {
                     visit(*n.lhs);
                     visit(*n.rhs);
                   },
                   [&](Exp::Paren& n) { visit(*n.inner); },
                   [&](Exp::New& n) {
                     visit(*n.callee);
                     for (auto& a : n.args) visit(*a);
                   },
                   [](auto&) {},
               },
               e.node);
  }

  void visit(Lexp& l) {
    l.eid = Eid{next++};
    if (auto* m = std::get_if<Lexp::Member>(&l.node)) visit(*m->object);
  }
};

}  // namespace detail

/// Parses SDTL source text into an id-annotated program.
inline Program parse(std::string_view source) {
  detail::Parser parser(lex::tokenize(source));
  StmPtr root = parser.program();
  detail::Numbering numbering;
  numbering.visit(*root);
  return Program(std::move(root), numbering.next - 1);
}

}  // namespace sdtl
