#include "catdiag/parser.hpp"

#include "catdiag/error.hpp"
#include "catdiag/kernel.hpp"

#include <cctype>
#include <optional>
#include <set>

namespace catdiag {

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Meta, Colon, Arrow, FatArrow, LParen, RParen, Dot, Equals, Comma, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, int c) { out.push_back({k, std::move(text), line, c}); };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      push(Tok::Newline, "\n", col);
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    int start_col = col;
    auto take_ident = [&](std::size_t from) {
      std::size_t j = from;
      while (j < src.size()) {
        if (ident_char(src[j])) {
          ++j;
        } else if (src[j] == '-' && j + 1 < src.size() && std::isalnum(static_cast<unsigned char>(src[j + 1]))) {
          j += 2;
        } else {
          break;
        }
      }
      return j;
    };
    if (ident_start(c)) {
      std::size_t j = take_ident(i);
      push(Tok::Ident, std::string(src.substr(i, j - i)), start_col);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (c == '?' && i + 1 < src.size() && ident_start(src[i + 1])) {
      std::size_t j = take_ident(i + 1);
      push(Tok::Meta, std::string(src.substr(i + 1, j - i - 1)), start_col);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "->" || two == "=>") {
      push(two == "->" ? Tok::Arrow : Tok::FatArrow, std::string(two), start_col);
      i += 2;
      col += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case ':': k = Tok::Colon; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '.': k = Tok::Dot; break;
      case '=': k = Tok::Equals; break;
      case ',': k = Tok::Comma; break;
      default: throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    }
    push(k, std::string(1, c), start_col);
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const std::set<std::string, std::less<>> kReserved = {"category", "object", "morphism", "functor", "map",
                                                      "hypothesis", "lemma",  "goal",     "forall",  "exists",
                                                      "in",         "cat",    "prop",     "id",      "I"};

// ---------------------------------------------------------------- raw syntax

struct Raw {
  enum Kind { Name, MetaRef, Ident, IdOf, Comp, Apply } kind;
  std::string name;
  int meta = -1;
  std::vector<Raw> kids;
  int line = 0;
  int col = 0;
};

struct RawSort {
  SortKind kind = SortKind::Cat;
  std::vector<Raw> terms;     // Obj: cat | Mor: src,dst | Funct: src,dst | Eq: lhs,rhs
  std::optional<Raw> cat;     // Mor / Map: `in C`
  std::vector<RawSort> sorts; // Map
};

struct RawBinderGroup {
  Quantifier q;
  std::vector<std::string> names;
  RawSort sort;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(peek().line, peek().col, msg + (at(Tok::End) ? " at end of input" : " near '" + describe() + "'"));
  }

  std::string describe() const { return at(Tok::Newline) ? "end of line" : peek().text; }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return next();
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "'");
    next();
  }

  std::string name() {
    if (!at(Tok::Ident)) fail("expected a name");
    if (kReserved.count(peek().text)) fail("'" + peek().text + "' is reserved");
    return next().text;
  }

  void skip_newlines() {
    while (at(Tok::Newline)) next();
  }

  void end_of_statement() {
    if (!at(Tok::Newline) && !at(Tok::End)) fail("expected end of line");
  }

  // term := app ('.' app)*
  Raw term() {
    Raw acc = app();
    while (at(Tok::Dot)) {
      const Token& t = next();
      Raw rhs = app();
      acc = Raw{Raw::Comp, {}, -1, {std::move(acc), std::move(rhs)}, t.line, t.col};
    }
    return acc;
  }

  bool atom_start() const {
    if (at(Tok::Meta) || at(Tok::LParen)) return true;
    if (!at(Tok::Ident)) return false;
    const std::string& w = peek().text;
    return w == "I" || w == "id" || !kReserved.count(w);
  }

  Raw app() {
    Raw head = atom();
    if (!atom_start()) return head;
    Raw out{Raw::Apply, {}, -1, {}, head.line, head.col};
    out.kids.push_back(std::move(head));
    while (atom_start()) out.kids.push_back(atom());
    return out;
  }

  Raw atom() {
    const Token& t = peek();
    if (at(Tok::LParen)) {
      next();
      Raw inner = term();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (at(Tok::Meta)) {
      next();
      const std::string& s = t.text;
      if (s.size() < 2 || s[0] != 'm' || s.find_first_not_of("0123456789", 1) != std::string::npos) {
        throw SyntaxError(t.line, t.col, "metavariables are written ?m<number>");
      }
      return Raw{Raw::MetaRef, {}, std::stoi(s.substr(1)), {}, t.line, t.col};
    }
    if (at_word("I")) {
      next();
      return Raw{Raw::Ident, {}, -1, {}, t.line, t.col};
    }
    if (at_word("id")) {
      next();
      Raw obj = atom();
      return Raw{Raw::IdOf, {}, -1, {std::move(obj)}, t.line, t.col};
    }
    if (at(Tok::Ident) && !kReserved.count(t.text)) {
      next();
      return Raw{Raw::Name, t.text, -1, {}, t.line, t.col};
    }
    fail("expected a term");
  }

  // sort := 'cat' | 'prop' | '(' sort ')' '=>' '(' sort ')' ['in' term]
  //       | term '->' term ['in' term] | term '=>' term | term '=' term | term
  RawSort sort() {
    if (at_word("cat")) {
      next();
      return {SortKind::Cat, {}, {}, {}};
    }
    if (at_word("prop")) {
      next();
      return {SortKind::Prop, {}, {}, {}};
    }
    if (at(Tok::LParen)) {
      std::size_t m = mark();
      try {
        next();
        RawSort arg = sort();
        expect(Tok::RParen, "')'");
        if (at(Tok::FatArrow)) {
          next();
          RawSort res = map_result();
          RawSort out{SortKind::Map, {}, {}, {std::move(arg), std::move(res)}};
          if (at_word("in")) {
            next();
            out.cat = term();
          }
          return out;
        }
      } catch (const SyntaxError&) {
      }
      reset(m);
    }
    Raw first = term();
    if (at(Tok::Arrow)) {
      next();
      Raw second = term();
      RawSort out{SortKind::Mor, {std::move(first), std::move(second)}, {}, {}};
      if (at_word("in")) {
        next();
        out.cat = term();
      }
      return out;
    }
    if (at(Tok::FatArrow)) {
      next();
      return {SortKind::Funct, {std::move(first), term()}, {}, {}};
    }
    if (at(Tok::Equals)) {
      next();
      return {SortKind::Eq, {std::move(first), term()}, {}, {}};
    }
    return {SortKind::Obj, {std::move(first)}, {}, {}};
  }

  RawSort map_result() {
    if (at(Tok::LParen)) {
      next();
      RawSort s = sort();
      expect(Tok::RParen, "')'");
      return s;
    }
    return sort();
  }

  std::vector<RawBinderGroup> binders() {
    std::vector<RawBinderGroup> out;
    while (at_word("forall") || at_word("exists")) {
      Quantifier q = peek().text == "forall" ? Quantifier::Forall : Quantifier::Exists;
      next();
      if (!at(Tok::LParen)) fail("expected '(' after quantifier");
      while (at(Tok::LParen)) {
        next();
        RawBinderGroup g{q, {}, {}};
        while (at(Tok::Ident) && !at_word("cat")) {
          g.names.push_back(name());
          if (at(Tok::Colon)) break;
        }
        if (g.names.empty()) fail("expected binder names");
        expect(Tok::Colon, "':'");
        g.sort = sort();
        expect(Tok::RParen, "')'");
        out.push_back(std::move(g));
      }
      expect(Tok::Comma, "','");
    }
    return out;
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- elaboration

struct Hints {
  Term src;
  Term dst;
};

// An identity whose object nothing determines.
struct NeedHint {
  int line;
  int col;
};

class Elaborator {
public:
  Elaborator(const Context& ctx, const LocalScope* local) : ctx_(ctx), local_(local) {}

  Sort sort_of_term(const Term& t) const { return sort_of(t, ctx_, nullptr, local_); }

  Term term(const Raw& r, const Hints& h = {}) {
    switch (r.kind) {
      case Raw::Name: return name(r);
      case Raw::MetaRef:
        if (!ctx_.meta_exists(r.meta)) {
          throw SyntaxError(r.line, r.col, "unknown metavariable ?m" + std::to_string(r.meta));
        }
        return Term::meta(r.meta);
      case Raw::Ident:
        if (h.src.valid()) return Term::id(h.src);
        if (h.dst.valid()) return Term::id(h.dst);
        throw NeedHint{r.line, r.col};
      case Raw::IdOf: {
        Term obj = term(r.kids[0]);
        Sort s = sort_of_term(obj);
        if (!s.is(SortKind::Obj)) throw Error(Errc::IllSorted, "'" + print(obj) + "' is not an object");
        return Term::id(obj);
      }
      case Raw::Comp: return composition(r, h);
      case Raw::Apply: return application(r);
    }
    throw SyntaxError(r.line, r.col, "bad term");
  }

  /// Elaborates a term and checks that it is sorted.
  Term checked(const Raw& r, const Hints& h = {}) {
    Term t = term(r, h);
    sort_of_term(t);
    return t;
  }

  Sort equation(const Raw& lhs, const Raw& rhs) {
    std::optional<Term> l;
    try {
      l = checked(lhs);
    } catch (const NeedHint&) {
    }
    Hints hr;
    if (l) hr = endpoints(*l);
    Term r = checked(rhs, hr);
    if (!l) l = checked(lhs, endpoints(r));
    Sort sl = sort_of_term(*l);
    Sort sr = sort_of_term(r);
    if (!sl.is(SortKind::Mor)) throw Error(Errc::IllSorted, "'" + print(*l) + "' is not a morphism");
    if (!sort_equal(sl, sr)) {
      throw Error(Errc::IllSorted, "sides have different sorts: " + print(sl) + " and " + print(sr));
    }
    return Sort::eq(sl.category(), sl.src(), sl.dst(), *l, r);
  }

  Sort sort(const RawSort& rs, const Term& inherited_cat = {}) {
    switch (rs.kind) {
      case SortKind::Cat: return Sort::cat();
      case SortKind::Prop: return Sort::prop();
      case SortKind::Obj: {
        Term c = checked(rs.terms[0]);
        expect_category(c);
        return Sort::obj(c);
      }
      case SortKind::Funct: {
        Term a = checked(rs.terms[0]);
        Term b = checked(rs.terms[1]);
        expect_category(a);
        expect_category(b);
        return Sort::funct(a, b);
      }
      case SortKind::Mor: {
        Term src = checked(rs.terms[0]);
        Term dst = checked(rs.terms[1]);
        Sort ss = sort_of_term(src);
        Sort ds = sort_of_term(dst);
        if (!ss.is(SortKind::Obj)) throw Error(Errc::IllSorted, "'" + print(src) + "' is not an object");
        if (!ds.is(SortKind::Obj)) throw Error(Errc::IllSorted, "'" + print(dst) + "' is not an object");
        Term c = inherited_cat;
        if (rs.cat) {
          c = checked(*rs.cat);
          expect_category(c);
        }
        if (!c.valid()) c = ss.category();
        if (canonical(ss.category()) != canonical(c) || canonical(ds.category()) != canonical(c)) {
          throw Error(Errc::IllSorted, "endpoints of " + print(src) + " -> " + print(dst) + " are not in " + print(c));
        }
        return Sort::mor(c, src, dst);
      }
      case SortKind::Eq: return equation(rs.terms[0], rs.terms[1]);
      case SortKind::Map: {
        Term c = inherited_cat;
        if (rs.cat) {
          c = checked(*rs.cat);
          expect_category(c);
        }
        Sort arg = sort(rs.sorts[0], c);
        Sort res = sort(rs.sorts[1], c);
        for (const Sort* s : {&arg, &res}) {
          if (s->is(SortKind::Prop)) throw Error(Errc::IllSorted, "maps must range over categorical sorts");
        }
        return Sort::map(std::move(arg), std::move(res));
      }
    }
    throw Error(Errc::IllSorted, "bad sort");
  }

  void expect_category(const Term& c) const {
    if (!sort_of_term(c).is(SortKind::Cat)) throw Error(Errc::IllSorted, "'" + print(c) + "' is not a category");
  }

private:
  Term name(const Raw& r) const {
    if (local_) {
      std::string b = std::string(1, kBinderPrefix) + r.name;
      if (local_->count(b)) return Term::constant(b);
    }
    if (ctx_.find(r.name) || ctx_.lemma(r.name)) return Term::constant(r.name);
    throw Error(Errc::UndeclaredConstant,
                std::to_string(r.line) + ":" + std::to_string(r.col) + ": undeclared constant '" + r.name + "'");
  }

  Hints endpoints(const Term& t) const {
    Sort s = sort_of_term(t);
    if (!s.is(SortKind::Mor)) return {};
    return {s.src(), s.dst()};
  }

  static void leaves(const Raw& r, std::vector<const Raw*>& out) {
    if (r.kind == Raw::Comp) {
      leaves(r.kids[0], out);
      leaves(r.kids[1], out);
    } else {
      out.push_back(&r);
    }
  }

  Term composition(const Raw& r, const Hints& h) {
    std::vector<const Raw*> ls;
    leaves(r, ls);
    std::vector<Term> ts(ls.size());
    std::vector<Term> obj(ls.size()); // object of each I leaf
    std::vector<Hints> ends(ls.size());
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (ls[i]->kind == Raw::Ident) continue;
      ts[i] = checked(*ls[i]);
      Sort s = sort_of_term(ts[i]);
      if (!s.is(SortKind::Mor)) {
        throw Error(Errc::IllTypedComposition, "'" + print(ts[i]) + "' is not a morphism");
      }
      ends[i] = {s.src(), s.dst()};
    }
    Term cur = h.src;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (ts[i].valid()) {
        cur = ends[i].dst;
      } else if (cur.valid()) {
        obj[i] = cur;
      }
    }
    cur = h.dst;
    for (std::size_t i = ls.size(); i-- > 0;) {
      if (ts[i].valid()) {
        cur = ends[i].src;
      } else if (!obj[i].valid() && cur.valid()) {
        obj[i] = cur;
      } else if (obj[i].valid()) {
        cur = obj[i];
      }
    }
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (ts[i].valid()) continue;
      if (!obj[i].valid()) throw NeedHint{ls[i]->line, ls[i]->col};
      ts[i] = Term::id(obj[i]);
    }
    std::size_t next = 0;
    return rebuild(r, ts, next);
  }

  static Term rebuild(const Raw& r, const std::vector<Term>& ts, std::size_t& next) {
    if (r.kind != Raw::Comp) return ts[next++];
    Term a = rebuild(r.kids[0], ts, next);
    Term b = rebuild(r.kids[1], ts, next);
    return Term::comp(std::move(a), std::move(b));
  }

  Term application(const Raw& r) {
    const Raw& head = r.kids[0];
    if (head.kind == Raw::Name && !(local_ && local_->count(std::string(1, kBinderPrefix) + head.name)) &&
        ctx_.lemma(head.name)) {
      std::vector<Term> args;
      for (std::size_t i = 1; i < r.kids.size(); ++i) args.push_back(checked(r.kids[i]));
      return make_spine(Term::constant(head.name), args);
    }
    // Right-associative: `F G x` is `F (G x)`.
    Term arg = checked(r.kids.back());
    for (std::size_t i = r.kids.size() - 1; i-- > 0;) {
      Term fn = checked(r.kids[i]);
      arg = apply(fn, arg, r.kids[i]);
    }
    return arg;
  }

  Term apply(const Term& fn, const Term& arg, const Raw& at) const {
    Sort fs = sort_of_term(fn);
    if (fs.is(SortKind::Funct)) {
      Sort as = sort_of_term(arg);
      if (as.is(SortKind::Obj)) return Term::fobj(fn, arg);
      if (as.is(SortKind::Mor)) return Term::fmor(fn, arg);
      throw Error(Errc::IllTypedApplication, "functor '" + print(fn) + "' applied to '" + print(arg) + "'");
    }
    if (fs.is(SortKind::Map)) {
      Term t = Term::app(fn, arg);
      sort_of_term(t);
      return t;
    }
    throw Error(Errc::IllTypedApplication, std::to_string(at.line) + ":" + std::to_string(at.col) + ": '" +
                                               print(fn) + "' cannot be applied");
  }

  const Context& ctx_;
  const LocalScope* local_;
};

template <class F>
auto guarded(const std::string& decl, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NeedHint& n) {
    throw Error(Errc::IllSorted, "in '" + decl + "': " + std::to_string(n.line) + ":" + std::to_string(n.col) +
                                     ": cannot infer the object of I");
  } catch (const SyntaxError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), "in '" + decl + "': " + e.what());
  }
}

void declare_names(Context& ctx, const std::vector<std::string>& names, DeclKind kind, const Sort& s) {
  for (const auto& n : names) ctx.declare(n, kind, s);
}

void statement(Parser& p, Context& ctx, bool lemmas_only) {
  const Token& kw = p.peek();
  if (kw.kind != Tok::Ident) p.fail("expected a declaration");
  std::string word = kw.text;
  if (lemmas_only && word != "lemma") p.fail("only lemmas are allowed here");
  p.next();
  auto names = [&] {
    std::vector<std::string> out;
    out.push_back(p.name());
    while (p.at(Tok::Ident) && !kReserved.count(p.peek().text)) out.push_back(p.name());
    return out;
  };
  Elaborator el(ctx, nullptr);

  if (word == "category") {
    for (const auto& n : names()) ctx.declare(n, DeclKind::Category, Sort::cat());
  } else if (word == "object" || word == "morphism" || word == "functor" || word == "map") {
    auto ns = names();
    p.expect(Tok::Colon, "':'");
    RawSort rs = word == "object" ? RawSort{SortKind::Obj, {p.term()}, {}, {}} : p.sort();
    SortKind want = word == "object"     ? SortKind::Obj
                    : word == "morphism" ? SortKind::Mor
                    : word == "functor"  ? SortKind::Funct
                                         : SortKind::Map;
    Sort s = guarded(ns.front(), [&] { return el.sort(rs); });
    if (s.kind != want) throw Error(Errc::IllSorted, "in '" + ns.front() + "': wrong kind of sort for " + word);
    DeclKind dk = word == "object"     ? DeclKind::Object
                  : word == "morphism" ? DeclKind::Morphism
                  : word == "functor"  ? DeclKind::Functor
                                       : DeclKind::Map;
    declare_names(ctx, ns, dk, s);
  } else if (word == "hypothesis" || word == "goal") {
    std::string n = p.name();
    p.expect(Tok::Colon, "':'");
    Raw lhs = p.term();
    p.expect(Tok::Equals, "'='");
    Raw rhs = p.term();
    Sort s = guarded(n, [&] { return el.equation(lhs, rhs); });
    if (word == "goal") {
      ctx.add_goal(n, s);
    } else {
      ctx.declare(n, DeclKind::Hypothesis, s);
    }
  } else if (word == "lemma") {
    std::string n = p.name();
    p.expect(Tok::Colon, "':'");
    auto groups = p.binders();
    Raw lhs = p.term();
    p.expect(Tok::Equals, "'='");
    Raw rhs = p.term();
    LemmaStatement l{n, {}, {}};
    LocalScope scope;
    guarded(n, [&] {
      Elaborator le(ctx, &scope);
      for (const auto& g : groups) {
        Sort s = le.sort(g.sort);
        for (const auto& b : g.names) {
          std::string bn = std::string(1, kBinderPrefix) + b;
          if (scope.count(bn)) throw Error(Errc::DuplicateName, "binder '" + b + "' repeated");
          scope[bn] = s;
          l.binders.push_back({bn, s, g.q});
        }
      }
      l.conclusion = le.equation(lhs, rhs);
      return 0;
    });
    register_lemma(ctx, std::move(l));
  } else {
    throw SyntaxError(kw.line, kw.col, "unknown declaration '" + word + "'");
  }
  p.end_of_statement();
}

void parse_statements(Context& ctx, std::string_view text, bool lemmas_only) {
  Parser p(lex(text));
  p.skip_newlines();
  while (!p.at(Tok::End)) {
    statement(p, ctx, lemmas_only);
    p.skip_newlines();
  }
}

Parser single_line(std::string_view text) {
  auto toks = lex(text);
  std::vector<Token> kept;
  for (auto& t : toks) {
    if (t.kind != Tok::Newline) kept.push_back(std::move(t));
  }
  return Parser(std::move(kept));
}

template <class F>
auto unguarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NeedHint& n) {
    throw Error(Errc::IllSorted, std::to_string(n.line) + ":" + std::to_string(n.col) + ": cannot infer the object of I");
  }
}

} // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s[0])) return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (ident_char(s[i])) continue;
    if (s[i] == '-' && i + 1 < s.size() && std::isalnum(static_cast<unsigned char>(s[i + 1]))) continue;
    return false;
  }
  return true;
}

Context parse_context(std::string_view text) {
  Context ctx;
  parse_into(ctx, text);
  return ctx;
}

void parse_into(Context& ctx, std::string_view text) { parse_statements(ctx, text, false); }

void parse_lemma_library(Context& ctx, std::string_view text) { parse_statements(ctx, text, true); }

Term parse_term(std::string_view text, const Context& ctx) {
  Parser p = single_line(text);
  Raw r = p.term();
  if (!p.at(Tok::End)) p.fail("unexpected input after term");
  Elaborator el(ctx, nullptr);
  return unguarded([&] { return el.checked(r); });
}

Sort parse_equation(std::string_view text, const Context& ctx) {
  auto v = parse_term_or_equation(text, ctx);
  if (auto* s = std::get_if<Sort>(&v)) return *s;
  throw Error(Errc::Syntax, "expected an equation 'lhs = rhs'");
}

std::variant<Term, Sort> parse_term_or_equation(std::string_view text, const Context& ctx) {
  Parser p = single_line(text);
  Raw lhs = p.term();
  Elaborator el(ctx, nullptr);
  if (p.at(Tok::Equals)) {
    p.next();
    Raw rhs = p.term();
    if (!p.at(Tok::End)) p.fail("unexpected input after equation");
    return unguarded([&] { return el.equation(lhs, rhs); });
  }
  if (!p.at(Tok::End)) p.fail("unexpected input after term");
  return unguarded([&] { return el.checked(lhs); });
}

void register_lemma(Context& ctx, LemmaStatement lemma) {
  std::vector<std::pair<std::string, Term>> names;
  std::size_t k = 0;
  bool seen_forall = false;
  std::vector<std::pair<std::string, Sort>> skolems;
  for (const auto& b : lemma.binders) {
    if (b.quantifier == Quantifier::Forall) {
      seen_forall = true;
      continue;
    }
    // Existentials under a universal depend on it; such lemmas are rejected
    // by the admissibility check and get no projection constants.
    if (seen_forall) break;
    std::string sk = skolem_name(lemma.name, k++);
    skolems.emplace_back(sk, map_terms(b.sort, [&](const Term& t) { return replace_constants(t, names); }));
    names.emplace_back(b.name, Term::constant(sk));
  }
  for (const auto& [sk, s] : skolems) {
    if (ctx.declared(sk)) throw Error(Errc::DuplicateName, "duplicate declaration '" + sk + "'");
  }
  ctx.add_lemma(std::move(lemma));
  for (auto& [sk, s] : skolems) ctx.declare(sk, DeclKind::Skolem, s);
}

} // namespace catdiag
