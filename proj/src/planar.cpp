#include "catdiag/error.hpp"
#include "catdiag/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace catdiag {

namespace {

constexpr double kEps = 1e-7;

[[noreturn]] void nonplanar(const std::string& msg) { throw Error(Errc::NonPlanarPositions, msg); }

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

int orient(Point o, Point a, Point b) {
  double c = cross(o, a, b);
  return c > kEps ? 1 : c < -kEps ? -1 : 0;
}

bool on_segment(Point p, Point a, Point b) {
  return orient(a, b, p) == 0 && std::min(a.x, b.x) - kEps <= p.x && p.x <= std::max(a.x, b.x) + kEps &&
         std::min(a.y, b.y) - kEps <= p.y && p.y <= std::max(a.y, b.y) + kEps;
}

bool near(Point a, Point b) { return std::abs(a.x - b.x) < kEps && std::abs(a.y - b.y) < kEps; }

// -1 outside, 0 on the boundary, 1 inside (even-odd).
int locate(Point p, const std::vector<Point>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    Point a = poly[i];
    Point b = poly[j];
    if (on_segment(p, a, b)) return 0;
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in ? 1 : -1;
}

// Vertex of the drawn graph: a node, or the bend of an edge.
struct Vertex {
  int node = -1;
  int bend_of = -1;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct Segment {
  Vertex a;
  Vertex b;
  Point pa;
  Point pb;
  int edge;
};

struct HalfEdge {
  Vertex from;
  Vertex to;
  double angle;
  int edge;
  bool along; // traverses the edge from src to dst
};

struct Region {
  std::vector<int> a; // two directed paths with common endpoints
  std::vector<int> b;
  Point centroid;
  int index;
};

std::vector<Point> path_points(const Diagram& d, const LayoutPositions& pos, const std::vector<int>& path) {
  std::vector<Point> out;
  for (int id : path) {
    auto pl = edge_polyline(d, pos, id);
    if (out.empty()) out.push_back(pl.front());
    out.insert(out.end(), pl.begin() + 1, pl.end());
  }
  return out;
}

std::vector<Segment> segments_of(const Diagram& d, const LayoutPositions& pos, int edge) {
  const Edge* e = d.edge(edge);
  auto pl = edge_polyline(d, pos, edge);
  std::vector<Vertex> vs{{e->src, -1}};
  for (std::size_t i = 1; i + 1 < pl.size(); ++i) vs.push_back({-1, edge});
  vs.push_back({e->dst, -1});
  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < pl.size(); ++i) out.push_back({vs[i], vs[i + 1], pl[i], pl[i + 1], edge});
  return out;
}

void check_crossings(const std::vector<Segment>& segs, const Diagram& d) {
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const Segment& s = segs[i];
      const Segment& t = segs[j];
      std::set<Vertex> shared;
      for (Vertex v : {s.a, s.b}) {
        if (v == t.a || v == t.b) shared.insert(v);
      }
      auto name = [&](int e) { return d.edge(e)->name; };
      std::string who = "edges '" + name(s.edge) + "' and '" + name(t.edge) + "'";
      if (shared.size() == 2) nonplanar(who + " are drawn on top of each other");
      int o1 = orient(s.pa, s.pb, t.pa);
      int o2 = orient(s.pa, s.pb, t.pb);
      int o3 = orient(t.pa, t.pb, s.pa);
      int o4 = orient(t.pa, t.pb, s.pb);
      if (o1 * o2 < 0 && o3 * o4 < 0) nonplanar(who + " cross");
      if (shared.size() == 1) {
        // Collinear overlap beyond the shared vertex.
        if (o1 == 0 && o2 == 0) {
          Point far_t = shared.count(t.a) ? t.pb : t.pa;
          Point far_s = shared.count(s.a) ? s.pb : s.pa;
          if (on_segment(far_t, s.pa, s.pb) || on_segment(far_s, t.pa, t.pb)) nonplanar(who + " overlap");
        }
        continue;
      }
      if ((!(t.a == s.a || t.a == s.b) && on_segment(t.pa, s.pa, s.pb)) ||
          (!(t.b == s.a || t.b == s.b) && on_segment(t.pb, s.pa, s.pb)) ||
          (!(s.a == t.a || s.a == t.b) && on_segment(s.pa, t.pa, t.pb)) ||
          (!(s.b == t.a || s.b == t.b) && on_segment(s.pb, t.pa, t.pb))) {
        nonplanar(who + " touch");
      }
    }
  }
}

// Bounded faces of the drawing, as pairs of directed paths.
std::vector<Region> regions_of(const std::vector<Segment>& segs) {
  std::map<Vertex, std::vector<HalfEdge>> out;
  std::map<Vertex, Point> where;
  for (const auto& s : segs) {
    where[s.a] = s.pa;
    where[s.b] = s.pb;
    out[s.a].push_back({s.a, s.b, std::atan2(s.pb.y - s.pa.y, s.pb.x - s.pa.x), s.edge, true});
    out[s.b].push_back({s.b, s.a, std::atan2(s.pa.y - s.pb.y, s.pa.x - s.pb.x), s.edge, false});
  }
  for (auto& [v, hs] : out) {
    std::sort(hs.begin(), hs.end(), [](const HalfEdge& x, const HalfEdge& y) { return x.angle < y.angle; });
  }
  auto key = [](const HalfEdge& h) { return std::make_tuple(h.from, h.to, h.edge); };
  std::set<std::tuple<Vertex, Vertex, int>> used;
  std::vector<Region> regions;
  for (const auto& [v0, hs0] : out) {
    for (const auto& start : hs0) {
      if (used.count(key(start))) continue;
      std::vector<HalfEdge> cycle;
      HalfEdge h = start;
      while (used.insert(key(h)).second) {
        cycle.push_back(h);
        const auto& at = out.at(h.to);
        std::size_t i = 0;
        while (!(at[i].to == h.from && at[i].edge == h.edge)) ++i;
        h = at[(i + at.size() - 1) % at.size()];
      }
      double area = 0;
      Point c{0, 0};
      for (const auto& e : cycle) {
        Point p = where.at(e.from);
        Point q = where.at(e.to);
        area += p.x * q.y - q.x * p.y;
        c.x += p.x;
        c.y += p.y;
      }
      if (area <= kEps) continue; // the outer face, or a degenerate sliver
      c.x /= static_cast<double>(cycle.size());
      c.y /= static_cast<double>(cycle.size());

      // Collapse segments to edges, then cut the cycle into two runs.
      std::vector<std::pair<int, bool>> edges;
      for (const auto& e : cycle) {
        if (edges.empty() || edges.back().first != e.edge || edges.back().second != e.along) {
          edges.emplace_back(e.edge, e.along);
        }
      }
      if (edges.size() > 1 && edges.front() == edges.back()) edges.pop_back();
      std::size_t n = edges.size();
      std::size_t cut = n;
      int flips = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (edges[i].second != edges[(i + n - 1) % n].second) {
          ++flips;
          if (edges[i].second && cut == n) cut = i;
        }
      }
      if (flips != 2) nonplanar("a region is not bounded by two parallel paths");
      Region r;
      std::size_t i = cut;
      for (; edges[i % n].second; ++i) r.a.push_back(edges[i % n].first);
      for (; i < cut + n; ++i) r.b.push_back(edges[i % n].first);
      std::reverse(r.b.begin(), r.b.end());
      r.centroid = c;
      r.index = static_cast<int>(regions.size());
      regions.push_back(std::move(r));
    }
  }
  return regions;
}

std::ptrdiff_t find_run(const std::vector<int>& path, const std::vector<int>& run) {
  if (run.empty() || run.size() > path.size()) return -1;
  auto it = std::search(path.begin(), path.end(), run.begin(), run.end());
  return it == path.end() ? -1 : it - path.begin();
}

} // namespace

std::vector<FaceSpec> planar_specs(const Diagram& d, const Context& ctx, const std::string& goal,
                                   const LayoutPositions& pos) {
  auto hit = d.lookup(goal);
  if (!hit || hit->first != ObjectKind::Face || d.face(hit->second)->kind != FaceKind::Goal) {
    throw Error(Errc::UnknownGoal, "no goal named '" + goal + "'");
  }
  const Face& g = *d.face(hit->second);
  if (g.left == g.right) return {};
  for (const auto& n : d.nodes()) {
    if (!pos.pos.count(n.id)) nonplanar("node '" + n.name + "' has no position");
  }
  (void)ctx;

  std::vector<int> left = g.left;
  std::vector<int> right = g.right;
  std::vector<int> prefix;
  std::vector<int> suffix;
  while (!left.empty() && !right.empty() && left.front() == right.front()) {
    prefix.push_back(left.front());
    left.erase(left.begin());
    right.erase(right.begin());
  }
  while (!left.empty() && !right.empty() && left.back() == right.back()) {
    suffix.insert(suffix.begin(), left.back());
    left.pop_back();
    right.pop_back();
  }

  std::vector<Point> poly = path_points(d, pos, left);
  {
    std::vector<Point> r = path_points(d, pos, right);
    if (!poly.empty() && !r.empty()) poly.pop_back();
    for (std::size_t i = r.size(); i-- > (poly.empty() ? 0 : 1);) poly.push_back(r[i]);
  }
  if (poly.size() < 3) nonplanar("the goal's sides enclose no area");

  std::set<int> chosen(left.begin(), left.end());
  chosen.insert(right.begin(), right.end());
  for (const auto& e : d.edges()) {
    if (chosen.count(e.id) || e.identity || e.src == e.dst) continue;
    auto pl = edge_polyline(d, pos, e.id);
    bool inside = true;
    for (std::size_t i = 0; i < pl.size() && inside; ++i) inside = locate(pl[i], poly) >= 0;
    for (std::size_t i = 0; i + 1 < pl.size() && inside; ++i) {
      inside = locate({(pl[i].x + pl[i + 1].x) / 2, (pl[i].y + pl[i + 1].y) / 2}, poly) > 0;
    }
    if (inside) chosen.insert(e.id);
  }
  // Dangling edges bound nothing.
  std::set<int> boundary(left.begin(), left.end());
  boundary.insert(right.begin(), right.end());
  for (bool changed = true; changed;) {
    changed = false;
    std::map<int, int> degree;
    for (int id : chosen) {
      ++degree[d.edge(id)->src];
      ++degree[d.edge(id)->dst];
    }
    for (auto it = chosen.begin(); it != chosen.end();) {
      const Edge* e = d.edge(*it);
      if (!boundary.count(*it) && (degree[e->src] == 1 || degree[e->dst] == 1)) {
        it = chosen.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }

  std::vector<Segment> segs;
  for (int id : chosen) {
    auto s = segments_of(d, pos, id);
    segs.insert(segs.end(), s.begin(), s.end());
  }
  {
    std::map<Vertex, Point> where;
    for (const auto& s : segs) {
      where[s.a] = s.pa;
      where[s.b] = s.pb;
    }
    for (auto i = where.begin(); i != where.end(); ++i) {
      for (auto j = std::next(i); j != where.end(); ++j) {
        if (near(i->second, j->second)) nonplanar("two nodes share a position");
      }
    }
  }
  check_crossings(segs, d);
  std::vector<Region> regions = regions_of(segs);

  auto names = [&](auto first, auto last) {
    std::vector<std::string> out;
    for (auto it = first; it != last; ++it) out.push_back(d.edge(*it)->name);
    return out;
  };
  std::vector<FaceSpec> specs;
  std::vector<int> current = left;
  while (!regions.empty()) {
    const Region* best = nullptr;
    std::ptrdiff_t at = -1;
    bool forward = true;
    for (const auto& r : regions) {
      std::ptrdiff_t ia = find_run(current, r.a);
      std::ptrdiff_t ib = find_run(current, r.b);
      if (ia < 0 && ib < 0) continue;
      if (!best || r.centroid.x < best->centroid.x - kEps ||
          (std::abs(r.centroid.x - best->centroid.x) <= kEps && r.centroid.y < best->centroid.y - kEps)) {
        best = &r;
        at = ia >= 0 ? ia : ib;
        forward = ia >= 0;
      }
    }
    if (!best) nonplanar("the regions inside '" + goal + "' cannot be swept from one side to the other");
    const std::vector<int>& from = forward ? best->a : best->b;
    const std::vector<int>& to = forward ? best->b : best->a;
    FaceSpec spec;
    auto shared = [&](const std::vector<std::string>& v) {
      for (const auto& n : v) spec.steps.emplace_back(n);
    };
    shared(names(prefix.begin(), prefix.end()));
    shared(names(current.begin(), current.begin() + at));
    spec.steps.emplace_back(SpecBranch{names(from.begin(), from.end()), names(to.begin(), to.end())});
    shared(names(current.begin() + at + static_cast<std::ptrdiff_t>(from.size()), current.end()));
    shared(names(suffix.begin(), suffix.end()));
    specs.push_back(std::move(spec));

    std::vector<int> next(current.begin(), current.begin() + at);
    next.insert(next.end(), to.begin(), to.end());
    next.insert(next.end(), current.begin() + at + static_cast<std::ptrdiff_t>(from.size()), current.end());
    current = std::move(next);
    int idx = best->index;
    regions.erase(std::find_if(regions.begin(), regions.end(), [&](const Region& r) { return r.index == idx; }));
  }
  if (current != right) nonplanar("the regions inside '" + goal + "' do not connect its two sides");
  return specs;
}

} // namespace catdiag
