#include "doctest.h"
#include "support.hpp"

#include "catdiag/error.hpp"
#include "catdiag/layout.hpp"

using namespace catdiag;
using namespace catdiag::test;

TEST_CASE("layout is a function of the diagram") {
  Context ctx = corpus_context("demo.ctx");
  Diagram d = extract_diagram(ctx);
  LayoutPositions a = layout(d, ctx);
  LayoutPositions b = layout(d, ctx);
  CHECK(a == b);
  CHECK(a.seed == layout_seed(d, ctx));
  REQUIRE(a.pos.size() == d.nodes().size());
  LayoutOptions o;
  for (const auto& [id, p] : a.pos) {
    CHECK(p.x >= 0);
    CHECK(p.x <= o.width);
    CHECK(p.y >= 0);
    CHECK(p.y <= o.height);
  }
  // Distinct nodes end up apart.
  for (auto i = a.pos.begin(); i != a.pos.end(); ++i) {
    for (auto j = std::next(i); j != a.pos.end(); ++j) {
      CHECK(std::hypot(i->second.x - j->second.x, i->second.y - j->second.y) > 20);
    }
  }
}

TEST_CASE("layout seed ignores node order") {
  Context ctx = corpus_context("square.ctx");
  Diagram d = extract_diagram(ctx);
  Diagram e;
  for (auto it = d.nodes().rbegin(); it != d.nodes().rend(); ++it) e.add_node(it->term, it->name);
  Diagram f;
  for (const auto& n : d.nodes()) f.add_node(n.term, n.name);
  CHECK(layout_seed(e, ctx) == layout_seed(f, ctx));
}

TEST_CASE("pins hold and drag pins") {
  Context ctx = corpus_context("square.ctx");
  Diagram d = extract_diagram(ctx);
  LayoutPositions p = layout(d, ctx);
  int a = d.node_named("a").id;
  int b = d.node_named("b").id;
  pin(p, d, a);
  Point held = p.pos.at(a);
  LayoutPositions q = layout(d, ctx, &p);
  CHECK(q.pos.at(a) == held);
  CHECK(q.pins.count(a));

  LayoutPositions r = drag(d, ctx, q, b, {12.5, 34.25});
  CHECK(r.pos.at(b) == Point{12.5, 34.25});
  CHECK(r.pos.at(a) == held);
  CHECK(r.pins.count(b));

  unpin(r, d, b);
  CHECK_FALSE(r.pins.count(b));
  CHECK_THROWS_AS(pin(r, d, 9999), Error);
  CHECK_THROWS_AS(drag(d, ctx, r, 9999, {0, 0}), Error);
}

TEST_CASE("relayout keeps known positions as a starting point") {
  Context ctx = corpus_context("square.ctx");
  Diagram d = extract_diagram(ctx);
  LayoutPositions p = layout(d, ctx);
  LayoutPositions q = layout(d, ctx, &p);
  // Already relaxed: a second pass moves nodes only a little.
  for (const auto& [id, pt] : p.pos) {
    CHECK(std::hypot(pt.x - q.pos.at(id).x, pt.y - q.pos.at(id).y) < 200);
  }
}

TEST_CASE("parallel edges bend apart") {
  Context ctx = corpus_context("demo.ctx");
  Diagram d = extract_diagram(ctx);
  LayoutPositions p = layout(d, ctx);
  auto one = edge_polyline(d, p, d.edge_named("m1").id);
  auto two = edge_polyline(d, p, d.edge_named("m2").id);
  REQUIRE(one.size() == 3);
  REQUIRE(two.size() == 3);
  CHECK(one.front() == two.front());
  CHECK(one.back() == two.back());
  CHECK_FALSE(one[1] == two[1]);
  auto lone = edge_polyline(d, p, d.edge_named("mac").id);
  CHECK(lone.size() == 2);
}

TEST_CASE("sidecar round trip") {
  Context ctx = corpus_context("demo.ctx");
  Diagram d = extract_diagram(ctx);
  LayoutPositions p = layout(d, ctx);
  pin(p, d, d.node_named("c").id);
  std::string text = save_layout(d, p);
  LayoutPositions q = load_layout(d, text);
  CHECK(q.pos == p.pos);
  CHECK(q.pins == p.pins);

  LayoutPositions junk = load_layout(d, "pos nowhere 1 2\npos a x y\nbogus\npin a\n");
  CHECK(junk.pos.empty());
  CHECK(junk.pins.count(d.node_named("a").id));
}

TEST_CASE("single node sits in the middle") {
  Context ctx = parse_context("category C\nobject a : C\nmorphism u : a -> a in C\ngoal G : u = u . u\n");
  Diagram d = extract_diagram(ctx);
  LayoutPositions p = layout(d, ctx);
  REQUIRE(p.pos.size() == 1);
  CHECK(p.pos.begin()->second == Point{400, 300});
}
