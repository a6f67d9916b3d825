#include "doctest.h"
#include "support.hpp"

#include "catdiag/error.hpp"
#include "catdiag/kernel.hpp"

using namespace catdiag;
using catdiag::test::T;

TEST_CASE("demo context declarations") {
  Context ctx = test::corpus_context("demo.ctx");
  CHECK(ctx.count(DeclKind::Category) == 1);
  CHECK(ctx.count(DeclKind::Object) == 4);
  CHECK(ctx.count(DeclKind::Morphism) == 5);
  CHECK(ctx.count(DeclKind::Map) == 1);
  CHECK(ctx.count(DeclKind::Hypothesis) == 2);
  CHECK(ctx.lemmas().size() == 1);
  REQUIRE(ctx.goals().size() == 1);
  CHECK(ctx.goals()[0].name == "Goal-0");
  CHECK(ctx.meta(ctx.goals()[0].meta).sort.is(SortKind::Eq));
}

TEST_CASE("identity inference") {
  Context ctx = test::corpus_context("demo.ctx");
  const Sort& h1 = ctx.find("H1")->sort;
  CHECK(print(h1.rhs()) == "m2 . id c");
  Sort g = ctx.meta(ctx.goals()[0].meta).sort;
  CHECK(print(g.lhs()) == "id a . m' . (m3 . id c . (id c . m'') . (id d . id d))");
  CHECK(print(g.rhs()) == "f m' . (id c . (id c . id c . m'' . id d))");
}

TEST_CASE("identity with nothing around it takes the other side") {
  Context ctx = test::corpus_context("demo.ctx");
  parse_into(ctx, "hypothesis Hi : I . I = id b");
  CHECK(print(ctx.find("Hi")->sort.lhs()) == "id b . id b");
  CHECK_THROWS_AS(parse_into(ctx, "hypothesis Hj : I = I"), Error);
}

TEST_CASE("empty and comment-only files") {
  Context a = parse_context("");
  CHECK(a.declarations().empty());
  Context b = parse_context("# nothing\n\n   # here\n");
  CHECK(b.declarations().empty());
  CHECK(b.goals().empty());
}

TEST_CASE("undeclared object") {
  try {
    parse_context("category C\nmorphism m : a -> b in C\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UndeclaredConstant);
  }
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_context("category C\nobject a : C\nmorphism m : a -> -> a\n");
    FAIL("expected an error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 19);
  }
  CHECK_THROWS_AS(parse_context("category C\nobject a : C $\n"), SyntaxError);
  CHECK_THROWS_AS(parse_context("frobnicate x\n"), SyntaxError);
}

TEST_CASE("duplicate names") {
  try {
    parse_context("category C\nobject C : C\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DuplicateName);
  }
}

TEST_CASE("ill-typed hypothesis names the declaration") {
  try {
    parse_context("category C\nobject a b : C\nmorphism u : a -> b\nmorphism v : b -> a\nhypothesis Bad : u = v\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IllSorted);
    CHECK(std::string(e.what()).find("Bad") != std::string::npos);
  }
}

TEST_CASE("functor application and categories of morphisms") {
  Context ctx = test::corpus_context("fctx.ctx");
  Term fa = T(ctx, "F a");
  CHECK(fa.is(TermKind::FObj));
  Term fm = T(ctx, "F m1");
  CHECK(fm.is(TermKind::FMor));
  Sort s = sort_of(fm, ctx);
  CHECK(print(s) == "F a -> F (F a) in C");
  CHECK(T(ctx, "F F a") == Term::fobj(Term::constant("F"), Term::fobj(Term::constant("F"), Term::constant("a"))));
}

TEST_CASE("lemma binders and spines") {
  Context ctx = test::corpus_context("fctx.ctx");
  const auto* l = ctx.lemma("fctx");
  REQUIRE(l != nullptr);
  CHECK(l->binders.size() == 8);
  CHECK(l->forall_count() == 8);
  CHECK(l->binders[2].sort.is(SortKind::Funct));
  CHECK(l->binders[7].sort.is(SortKind::Eq));
  CHECK(print(l->conclusion) == "F m1 = F m2");

  Context demo = test::corpus_context("demo.ctx");
  Term inst = T(demo, "Hf m'");
  Sort s = sort_of(inst, demo);
  REQUIRE(s.is(SortKind::Eq));
  CHECK(print(s) == "f m' = m' . m1");
  CHECK_THROWS_AS(T(demo, "Hf m1"), Error);
}

TEST_CASE("existential binders become projection constants") {
  Context ctx = parse_context(
      "category C\nobject a : C\nlemma E : exists (e : a -> a), e = e\n"
      "lemma Late : forall (x : C), exists (e : x -> x), e = e\n");
  const Declaration* d = ctx.find("pi0_E");
  REQUIRE(d != nullptr);
  CHECK(d->kind == DeclKind::Skolem);
  CHECK(print(sort_of(T(ctx, "E"), ctx)) == "pi0_E = pi0_E");
  CHECK(ctx.find("pi0_Late") == nullptr);
}

TEST_CASE("identifiers") {
  CHECK(is_identifier("Goal-0-1"));
  CHECK(is_identifier("m''"));
  CHECK(is_identifier("mab_0"));
  CHECK_FALSE(is_identifier("Goal-"));
  CHECK_FALSE(is_identifier("0a"));
  CHECK_FALSE(is_identifier("a b"));
}

TEST_CASE("terms and equations over a context") {
  Context ctx = test::corpus_context("demo.ctx");
  auto v = parse_term_or_equation("m1 . m'' = m3 . m''", ctx);
  CHECK(std::holds_alternative<Sort>(v));
  auto w = parse_term_or_equation("H1", ctx);
  CHECK(std::holds_alternative<Term>(w));
  CHECK_THROWS_AS(parse_term("m1 m2", ctx), Error);
  CHECK_THROWS_AS(parse_term("m1 .", ctx), SyntaxError);
  int g = ctx.goals()[0].meta;
  CHECK(parse_term("?m" + std::to_string(g), ctx) == Term::meta(g));
  CHECK_THROWS_AS(parse_term("?m99", ctx), SyntaxError);
}

TEST_CASE("printed terms parse back") {
  Context ctx = test::corpus_context("demo.ctx");
  for (const char* s : {"m' . m3 . m''", "f m' . m''", "id a", "m' . (m1 . m'')", "f (m' . id b)"}) {
    Term t = T(ctx, s);
    CHECK(T(ctx, print(t)) == t);
  }
}

TEST_CASE("lemma library accepts lemmas only") {
  Context ctx = test::corpus_context("demo.ctx");
  parse_lemma_library(ctx, "lemma assoc_ab : forall (u : a -> b in C), u . m1 = u . m1\n");
  CHECK(ctx.lemma("assoc_ab") != nullptr);
  CHECK_THROWS_AS(parse_lemma_library(ctx, "object z : C\n"), SyntaxError);
}
