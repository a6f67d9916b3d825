#include "doctest.h"
#include "support.hpp"

#include "catdiag/error.hpp"
#include "catdiag/kernel.hpp"
#include "catdiag/lemmas.hpp"
#include "catdiag/solver.hpp"

#include <algorithm>

using namespace catdiag;
using namespace catdiag::test;

namespace {

using Strings = std::vector<std::string>;
using Pairs = std::vector<std::pair<std::string, std::string>>;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Protocol;
}

Strings names_of(const Diagram& d) {
  Strings out;
  for (const auto& n : d.nodes()) out.push_back(n.name);
  for (const auto& e : d.edges()) out.push_back(e.name);
  for (const auto& f : d.faces()) out.push_back(f.name);
  return out;
}

// Demo state right before the lemma is applied.
void demo_prefix(Diagram& d, Context& ctx) {
  merge(d, ctx, "m3", "m3_0");
  merge(d, ctx, "m2", "m2_0");
  merge(d, ctx, "mcd", "mcd_0");
  compose_path(d, ctx, "mbd", {"m3", "mcd"});
  split_edge(d, ctx, "mbd");
  decompose(d, ctx, "Goal-0", parse_face_specs("mab:<m3;m2>:mcd;mab:<m2;m1>:mcd"));
}

const Pairs kDemoPairs{{"b", "b"}, {"a", "a"}, {"mac", "mac"}, {"m1", "m1"}, {"c", "c"}, {"mab", "mab"}};

} // namespace

TEST_CASE("admissibility") {
  Context ctx = corpus_context("demo.ctx");
  CHECK(admissible(*ctx.lemma("Hf")));

  LemmaStatement bad_sort = *ctx.lemma("Hf");
  bad_sort.binders.push_back({"$q", Sort::prop(), Quantifier::Forall});
  CHECK_FALSE(admissible(bad_sort));
  CHECK(inadmissible_reason(bad_sort).find("'q'") != std::string::npos);

  LemmaStatement late_exists = *ctx.lemma("Hf");
  late_exists.binders.push_back({"$y", Sort::obj(Term::constant("C")), Quantifier::Exists});
  CHECK_FALSE(admissible(late_exists));

  LemmaStatement no_eq = *ctx.lemma("Hf");
  no_eq.conclusion = Sort::prop();
  CHECK_FALSE(admissible(no_eq));
}

TEST_CASE("pattern of the demo lemma") {
  Context ctx = corpus_context("demo.ctx");
  Pattern p = pattern_of(ctx, "Hf");
  CHECK(names_of(p.diagram) == Strings{"a", "c", "b", "mac", "mab", "m1", "Hf"});
  CHECK(p.conclusion == "Hf");
  CHECK(p.premises.empty());
  REQUIRE(p.args.size() == 1);
  CHECK(p.args[0].is(TermKind::Meta));
  CHECK(print(face_statement(p.diagram.face_named("Hf"), ctx)) ==
        "f " + print(p.args[0]) + " = " + print(p.args[0]) + " . m1");
  // Each pattern gets its own metas.
  Pattern q = pattern_of(ctx, "Hf");
  CHECK(q.args[0] != p.args[0]);
  CHECK(code_of([&] { pattern_of(ctx, "nope"); }) == Errc::UnknownLemma);
}

TEST_CASE("pattern of fctx") {
  Context ctx = corpus_context("fctx.ctx");
  Pattern p = pattern_of(ctx, "fctx");
  CHECK(p.args.size() == 8);
  CHECK(p.premises == Strings{"p"});
  CHECK(p.conclusion == "fctx");
  CHECK(p.diagram.node_named("x").term == p.args[3]);
  CHECK(p.diagram.node_named("y").term == p.args[4]);
  CHECK(p.diagram.lookup("Fx"));
  CHECK(p.diagram.lookup("Fy"));
  CHECK(p.diagram.face_named("p").left.size() == 1);
}

TEST_CASE("fctx pushout against its goal") {
  Context ctx = corpus_context("fctx.ctx");
  Diagram d = extract_diagram(ctx);
  MatchSession s(ctx, "fctx");
  const auto& args = s.pattern().args;
  s.match(d, "fctx", "G");
  CHECK(s.subst().apply(args[3]) == Term::constant("a"));
  CHECK(s.subst().apply(args[2]) == Term::constant("F"));
  CHECK(s.subst().apply(args[0]) == Term::constant("C"));
  // Nothing is committed before apply.
  CHECK_FALSE(ctx.subst().bound(args[3].meta_id()));

  ApplyResult r = s.apply(d);
  CHECK(r.closed_goal);
  CHECK(r.conclusion == "G");
  REQUIRE(r.new_goals.size() == 1);
  const Face& g = d.face_named(r.new_goals[0]);
  CHECK(g.kind == FaceKind::Goal);
  CHECK(print(face_statement(g, ctx)) == "m1 = m2");
  CHECK(d.edge(g.left[0])->term == Term::constant("m1"));
  CHECK(face_proved(d.face_named("G"), ctx));
  CHECK_FALSE(face_proved(g, ctx));
  CHECK(audit(d, ctx).empty());

  // G's proof goes through the new hole; closing it closes G.
  int gm = ctx.goal("G")->meta;
  CHECK_FALSE(check_goal(gm, ctx));
  int pm = ctx.goal(r.new_goals[0])->meta;
  CHECK_FALSE(solve(d, ctx, r.new_goals[0]));
  ctx.assign_trace(pm, ProofTrace::hypothesis("nope"));
  CHECK_FALSE(check_goal(gm, ctx));
}

TEST_CASE("fctx premise matched to a hypothesis") {
  Context ctx = parse_context(slurp(corpus_path("fctx.ctx")) + "hypothesis H : m1 = m2\n");
  Diagram d = extract_diagram(ctx);
  MatchSession s(ctx, "fctx");
  s.match(d, "p", "H");
  s.match(d, "fctx", "G");
  ApplyResult r = s.apply(d);
  CHECK(r.new_goals.empty());
  CHECK(r.closed_goal);
  CHECK(check_goal(ctx.goal("G")->meta, ctx));
}

TEST_CASE("unmatched conclusion becomes a hypothesis face") {
  Context ctx = corpus_context("demo.ctx");
  Diagram d = extract_diagram(ctx);
  demo_prefix(d, ctx);
  MatchSession s(ctx, "Hf");
  for (const auto& [p, t] : kDemoPairs) s.match(d, p, t);
  ApplyResult r = s.apply(d);
  CHECK_FALSE(r.closed_goal);
  CHECK(r.new_goals.empty());
  CHECK(r.conclusion == "Hf");
  const Face& f = d.face_named("Hf");
  CHECK(f.kind == FaceKind::Hypothesis);
  CHECK(print(face_statement(f, ctx)) == "f m' = m' . m1");
  // Existing edges are reused, nothing new is drawn.
  CHECK(f.left == std::vector<int>{d.edge_named("mac").id});
  CHECK(f.right == std::vector<int>{d.edge_named("mab").id, d.edge_named("m1").id});
  CHECK(audit(d, ctx).empty());

  solve_goal(d, ctx, "Goal-0-2");
  CHECK(open_goals(d, ctx).empty());
  CHECK(check_goal(ctx.goal("Goal-0")->meta, ctx));
}

TEST_CASE("pair order does not change the result") {
  Pairs order = kDemoPairs;
  std::sort(order.begin(), order.end());
  std::string first;
  int runs = 0;
  do {
    if (runs++ % 37) continue; // a spread of the 720 orders
    Context ctx = corpus_context("demo.ctx");
    Diagram d = extract_diagram(ctx);
    demo_prefix(d, ctx);
    MatchSession s(ctx, "Hf");
    for (const auto& [p, t] : order) s.match(d, p, t);
    s.apply(d);
    std::string dump = to_json(d, ctx).dump();
    if (first.empty()) first = dump;
    CHECK(dump == first);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("match failures leave the session unchanged") {
  Context ctx = corpus_context("demo.ctx");
  Diagram d = extract_diagram(ctx);
  demo_prefix(d, ctx);
  MatchSession s(ctx, "Hf");
  s.match(d, "mab", "mab");
  Subst before = s.subst();

  CHECK(code_of([&] { s.match(d, "a", "mcd"); }) == Errc::KindMismatch);
  CHECK(code_of([&] { s.match(d, "b", "c"); }) == Errc::UnificationFailed);
  CHECK(code_of([&] { s.match(d, "zz", "a"); }) == Errc::UnknownNode);
  CHECK(code_of([&] { s.match(d, "a", "zz"); }) == Errc::UnknownNode);
  CHECK(code_of([&] { s.match(d, "mab", "mab"); }) == Errc::Refused);
  CHECK(code_of([&] { s.match(d, "m1", "m2"); }) == Errc::UnificationFailed);
  CHECK(s.subst() == before);
  CHECK(s.pairs().size() == 1);

  s.unmatch(d, "mab");
  CHECK(s.subst() == ctx.subst());
  CHECK(s.pairs().empty());
  CHECK(code_of([&] { s.unmatch(d, "mab"); }) == Errc::Refused);
  s.match(d, "m1", "m1");
  CHECK(s.pairs().size() == 1);
}

TEST_CASE("apply with no pairs copies the pattern") {
  Context ctx = corpus_context("demo.ctx");
  Diagram d = extract_diagram(ctx);
  std::size_t edges = d.edges().size();
  MatchSession s(ctx, "Hf");
  ApplyResult r = s.apply(d);
  CHECK(r.conclusion == "Hf");
  // f ?m and ?m are new; m1 reuses nothing because edges are glued only by pairs.
  CHECK(d.edges().size() == edges + 3);
  CHECK(audit(d, ctx).empty());
}
