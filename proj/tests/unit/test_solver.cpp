#include "doctest.h"
#include "support.hpp"

#include "../oracles/solver_oracle.hpp"

#include "catdiag/error.hpp"
#include "catdiag/solver.hpp"

using namespace catdiag;
using namespace catdiag::test;

namespace {

using Strings = std::vector<std::string>;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Protocol;
}

bool proved(const Diagram& d, const Context& ctx, const std::string& name) {
  return face_proved(d.face_named(name), ctx);
}

int meta_of(const Diagram& d, const Context& ctx, const std::string& name) {
  return ctx.resolve(d.face_named(name).eq).meta_id();
}

const char* kThree = R"(
category C
object a b : C
morphism m1 m2 m3 : a -> b in C
hypothesis H1 : m1 = m2
hypothesis H2 : m3 = m2
goal G : m1 = m3
)";

} // namespace

TEST_CASE("face specs parse and print") {
  auto specs = parse_face_specs("mab:<m3;m2>:mcd;mab:<m2;m1>:mcd");
  REQUIRE(specs.size() == 2);
  REQUIRE(specs[0].steps.size() == 3);
  CHECK(std::get<std::string>(specs[0].steps[0]) == "mab");
  CHECK(std::get<SpecBranch>(specs[0].steps[1]) == SpecBranch{{"m3"}, {"m2"}});
  CHECK(print_face_specs(specs) == "mab:<m3;m2>:mcd;mab:<m2;m1>:mcd");

  auto wide = parse_face_specs(" <f, g ; t> ");
  CHECK(std::get<SpecBranch>(wide[0].steps[0]) == SpecBranch{{"f", "g"}, {"t"}});
  CHECK(print_face_specs(wide) == "<f,g;t>");
  CHECK(print_face_specs(parse_face_specs("<;u>")) == "<;u>");
  CHECK(parse_face_specs("").empty());

  for (const char* bad : {"<a;b", "a::b", "a;", "<a,b>", "a b", "<a;b>>"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_face_specs(bad), SyntaxError);
  }
}

TEST_CASE("solve chains two hypotheses") {
  Context ctx = parse_context(kThree);
  Diagram d = extract_diagram(ctx);
  TraceRef t = solve(d, ctx, "G");
  REQUIRE(t);
  CHECK(check_trace(*t, face_statement(d.face_named("G"), ctx), ctx));
  CHECK_FALSE(proved(d, ctx, "G"));
  solve_goal(d, ctx, "G");
  CHECK(proved(d, ctx, "G"));
  CHECK(check_goal(meta_of(d, ctx, "G"), ctx));
  CHECK(code_of([&] { solve_goal(d, ctx, "G"); }) == Errc::NotAGoal);
}

TEST_CASE("solve respects the depth budget") {
  Context ctx = parse_context(R"(
category C
object a : C
morphism u v w x : a -> a in C
hypothesis H1 : u = v
hypothesis H2 : v = w
hypothesis H3 : w = x
goal G : u . u = x . x
)");
  Diagram d = extract_diagram(ctx);
  SolveOptions shallow;
  shallow.depth = 5;
  CHECK_FALSE(solve(d, ctx, "G", shallow));
  CHECK(code_of([&] { solve_goal(d, ctx, "G", shallow); }) == Errc::SolveFailed);
  SolveOptions enough;
  enough.depth = 6;
  REQUIRE(solve(d, ctx, "G", enough));
  solve_goal(d, ctx, "G", enough);
  CHECK(check_goal(meta_of(d, ctx, "G"), ctx));
}

TEST_CASE("solve inserts through identity sides") {
  Context ctx = parse_context(R"(
category C
object a b : C
morphism f : a -> b in C
morphism g : b -> a in C
hypothesis iso : f . g = I
goal G : f . g . f = f
)");
  Diagram d = extract_diagram(ctx);
  solve_goal(d, ctx, "G", {});
  CHECK(check_goal(meta_of(d, ctx, "G"), ctx));
}

TEST_CASE("solve cancellation") {
  Context ctx = parse_context(kThree);
  Diagram d = extract_diagram(ctx);
  std::atomic<bool> stop{true};
  SolveOptions o;
  o.cancel = &stop;
  CHECK(code_of([&] { solve(d, ctx, "G", o); }) == Errc::Cancelled);
}

TEST_CASE("solve errors on unknown names") {
  Context ctx = parse_context(kThree);
  Diagram d = extract_diagram(ctx);
  CHECK(code_of([&] { solve(d, ctx, "nope"); }) == Errc::UnknownGoal);
  CHECK(code_of([&] { solve(d, ctx, "H1"); }) == Errc::NotAGoal);
}

TEST_CASE("square with a diagonal decomposes along its regions") {
  Context ctx = corpus_context("square.ctx");
  Diagram d = extract_diagram(ctx);
  // One copy of each arrow.
  for (auto [x, y] : {std::pair{"f", "f_0"}, {"g", "g_0"}, {"h", "h_0"}, {"k", "k_0"}, {"t", "t_0"}}) merge(d, ctx, x, y);
  LayoutPositions pos;
  pos.pos[d.node_named("a").id] = {0, 0};
  pos.pos[d.node_named("b").id] = {100, 0};
  pos.pos[d.node_named("c").id] = {0, 100};
  pos.pos[d.node_named("d").id] = {100, 100};

  auto specs = planar_specs(d, ctx, "sq", pos);
  CHECK(print_face_specs(specs) == "<f,g;t>;<t;h,k>");
  auto subs = decompose(d, ctx, "sq", specs);
  CHECK(subs == Strings{"sq-0", "sq-1"});
  CHECK(proved(d, ctx, "sq-0"));
  CHECK(proved(d, ctx, "sq-1"));
  CHECK(check_goal(meta_of(d, ctx, "sq"), ctx));
  CHECK(open_goals(d, ctx).empty());
}

TEST_CASE("planar specs reject crossing drawings") {
  Context ctx = corpus_context("square.ctx");
  Diagram d = extract_diagram(ctx);
  for (auto [x, y] : {std::pair{"f", "f_0"}, {"g", "g_0"}, {"h", "h_0"}, {"k", "k_0"}, {"t", "t_0"}}) merge(d, ctx, x, y);
  LayoutPositions pos;
  // d pulled left of h: g crosses h.
  pos.pos[d.node_named("a").id] = {0, 0};
  pos.pos[d.node_named("b").id] = {100, 0};
  pos.pos[d.node_named("c").id] = {0, 100};
  pos.pos[d.node_named("d").id] = {-50, 50};
  CHECK(code_of([&] { planar_specs(d, ctx, "sq", pos); }) == Errc::NonPlanarPositions);
  LayoutPositions missing;
  CHECK(code_of([&] { planar_specs(d, ctx, "sq", missing); }) == Errc::NonPlanarPositions);
}

TEST_CASE("demo decomposition") {
  Context ctx = corpus_context("demo.ctx");
  Diagram d = extract_diagram(ctx);
  merge(d, ctx, "m3", "m3_0");
  merge(d, ctx, "m2", "m2_0");
  merge(d, ctx, "mcd", "mcd_0");
  compose_path(d, ctx, "mbd", {"m3", "mcd"});
  split_edge(d, ctx, "mbd");
  auto subs = decompose(d, ctx, "Goal-0", parse_face_specs("mab:<m3;m2>:mcd;mab:<m2;m1>:mcd"));
  CHECK(subs == Strings{"Goal-0-0", "Goal-0-1", "Goal-0-2"});
  CHECK(proved(d, ctx, "Goal-0-0"));
  CHECK(proved(d, ctx, "Goal-0-1"));
  CHECK_FALSE(proved(d, ctx, "Goal-0-2"));
  CHECK(print(face_statement(d.face_named("Goal-0-2"), ctx)) == "m' . m1 . m'' = f m' . m''");
  auto open = open_goals(d, ctx);
  REQUIRE(open.size() == 1);
  CHECK(open[0]->name == "Goal-0-2");
}

TEST_CASE("decompose validates its specs") {
  Context ctx = corpus_context("demo.ctx");
  Diagram d = extract_diagram(ctx);
  merge(d, ctx, "m3", "m3_0");
  merge(d, ctx, "m2", "m2_0");
  merge(d, ctx, "mcd", "mcd_0");
  Diagram before = d;
  auto attempt = [&](const std::string& text) {
    return code_of([&] { decompose(d, ctx, "Goal-0", parse_face_specs(text)); });
  };
  CHECK(attempt("mab:<m2;m1>:mcd") == Errc::NonChainingSpecs);        // does not start at the left side
  CHECK(attempt("mab:<m3;m2>:mcd;mab:<m3;m1>:mcd") == Errc::NonChainingSpecs); // gap between specs
  CHECK(attempt("mab:<m3;m2>") == Errc::NonChainingSpecs);            // stops short of the target
  CHECK(attempt("") == Errc::NonChainingSpecs);
  CHECK(attempt("mab:<zz;m2>:mcd") == Errc::UnknownEdge);
  CHECK(d == before);
  CHECK(code_of([&] { decompose(d, ctx, "H1", {}); }) == Errc::NotAGoal);
}

TEST_CASE("sub-goals never prove their parent") {
  Context ctx = parse_context(R"(
category C
object a : C
morphism u v : a -> a in C
goal G : u = v
)");
  Diagram d = extract_diagram(ctx);
  auto subs = decompose(d, ctx, "G", parse_face_specs("<u;v>"));
  REQUIRE(subs == Strings{"G-0"});
  CHECK_FALSE(proved(d, ctx, "G-0"));
  CHECK_FALSE(solve(d, ctx, "G-0"));
}

TEST_CASE("solver agrees with the reference search") {
  std::mt19937_64 rng(20240611);
  int agree_yes = 0;
  for (int i = 0; i < 60; ++i) {
    oracle::Problem p = oracle::random_problem(rng);
    CAPTURE(p.text());
    Context ctx = parse_context(p.text());
    Diagram d = extract_diagram(ctx);
    bool expect = oracle::provable(p, 6);
    bool got = proved(d, ctx, "G");
    if (!got) {
      TraceRef t = solve(d, ctx, "G");
      got = t != nullptr;
      if (t) CHECK(check_trace(*t, face_statement(d.face_named("G"), ctx), ctx));
    }
    CHECK(got == expect);
    agree_yes += got && expect;
  }
  CHECK(agree_yes > 10);
}
