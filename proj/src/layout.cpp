#include "catdiag/layout.hpp"

#include "catdiag/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace catdiag {

std::uint64_t layout_seed(const Diagram& d, const Context& ctx) {
  std::vector<std::string> labels;
  for (const auto& n : d.nodes()) labels.push_back(node_label(n, ctx));
  std::sort(labels.begin(), labels.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& l : labels) {
    for (unsigned char c : l) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

// Library distributions are not specified bit-for-bit across standard
// libraries, so doubles are taken from the top 53 bits directly.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void relax(const Diagram& d, LayoutPositions& p, const LayoutOptions& opts) {
  std::vector<int> ids;
  for (const auto& n : d.nodes()) ids.push_back(n.id);
  std::size_t n = ids.size();
  if (n == 0) return;
  if (n == 1) {
    if (!p.pins.count(ids[0])) p.pos[ids[0]] = {opts.width / 2, opts.height / 2};
    return;
  }
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[ids[i]] = i;
  std::vector<Point> at(n);
  for (std::size_t i = 0; i < n; ++i) at[i] = p.pos.at(ids[i]);

  std::vector<std::pair<std::size_t, std::size_t>> springs;
  for (const auto& e : d.edges()) {
    if (e.src == e.dst) continue;
    springs.emplace_back(index.at(e.src), index.at(e.dst));
  }
  double k = std::sqrt(opts.width * opts.height / static_cast<double>(n)) * 0.6;
  double temp = opts.width / 10;
  double cool = temp / (opts.iterations + 1);
  for (int it = 0; it < opts.iterations; ++it) {
    std::vector<Point> force(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double dx = at[i].x - at[j].x;
        double dy = at[i].y - at[j].y;
        double dist2 = dx * dx + dy * dy;
        if (dist2 < 1e-6) {
          // Coincident nodes: push apart along a fixed direction.
          dx = 1e-3 * static_cast<double>(j - i);
          dy = 1e-3;
          dist2 = dx * dx + dy * dy;
        }
        double dist = std::sqrt(dist2);
        double f = k * k * k / dist2;
        force[i].x += dx / dist * f;
        force[i].y += dy / dist * f;
        force[j].x -= dx / dist * f;
        force[j].y -= dy / dist * f;
      }
    }
    for (auto [a, b] : springs) {
      double dx = at[b].x - at[a].x;
      double dy = at[b].y - at[a].y;
      double dist = std::max(std::sqrt(dx * dx + dy * dy), 1e-9);
      double f = (dist - k) * 0.5;
      force[a].x += dx / dist * f;
      force[a].y += dy / dist * f;
      force[b].x -= dx / dist * f;
      force[b].y -= dy / dist * f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (p.pins.count(ids[i])) continue;
      double len = std::sqrt(force[i].x * force[i].x + force[i].y * force[i].y);
      if (len < 1e-12) continue;
      double step = std::min(len, temp);
      at[i].x = std::clamp(at[i].x + force[i].x / len * step, 0.0, opts.width);
      at[i].y = std::clamp(at[i].y + force[i].y / len * step, 0.0, opts.height);
    }
    temp -= cool;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!p.pins.count(ids[i])) p.pos[ids[i]] = at[i];
  }
}

} // namespace

LayoutPositions layout(const Diagram& d, const Context& ctx, const LayoutPositions* prev, const LayoutOptions& opts) {
  LayoutPositions p;
  p.seed = layout_seed(d, ctx);
  std::mt19937_64 rng(p.seed);
  for (const auto& n : d.nodes()) {
    double x = opts.width * (0.1 + 0.8 * unit(rng));
    double y = opts.height * (0.1 + 0.8 * unit(rng));
    if (prev) {
      if (auto it = prev->pos.find(n.id); it != prev->pos.end()) {
        x = it->second.x;
        y = it->second.y;
        if (prev->pins.count(n.id)) p.pins.insert(n.id);
      }
    }
    p.pos[n.id] = {x, y};
  }
  relax(d, p, opts);
  return p;
}

LayoutPositions drag(const Diagram& d, const Context& ctx, const LayoutPositions& p, int node, Point at,
                     const LayoutOptions& opts) {
  if (!d.node(node)) throw Error(Errc::UnknownNode, "no node with id " + std::to_string(node));
  LayoutPositions q = p;
  q.pos[node] = at;
  q.pins.insert(node);
  return layout(d, ctx, &q, opts);
}

void pin(LayoutPositions& p, const Diagram& d, int node) {
  if (!d.node(node)) throw Error(Errc::UnknownNode, "no node with id " + std::to_string(node));
  p.pins.insert(node);
}

void unpin(LayoutPositions& p, const Diagram& d, int node) {
  if (!d.node(node)) throw Error(Errc::UnknownNode, "no node with id " + std::to_string(node));
  p.pins.erase(node);
}

std::vector<Point> edge_polyline(const Diagram& d, const LayoutPositions& p, int edge) {
  const Edge* e = d.edge(edge);
  if (!e) throw Error(Errc::UnknownEdge, "no edge with id " + std::to_string(edge));
  Point a = p.pos.at(e->src);
  Point b = p.pos.at(e->dst);
  int lo = std::min(e->src, e->dst);
  int hi = std::max(e->src, e->dst);
  std::vector<int> siblings;
  for (const auto& o : d.edges()) {
    if (std::min(o.src, o.dst) == lo && std::max(o.src, o.dst) == hi && !o.identity) siblings.push_back(o.id);
  }
  if (siblings.size() <= 1 || e->src == e->dst) return {a, b};
  std::size_t k = static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), edge) - siblings.begin());
  // Offsets measured in the frame lo -> hi, so that reversed siblings bend
  // consistently.
  Point from = p.pos.at(lo);
  Point to = p.pos.at(hi);
  double dx = to.x - from.x;
  double dy = to.y - from.y;
  double len = std::max(std::sqrt(dx * dx + dy * dy), 1e-9);
  double nx = -dy / len;
  double ny = dx / len;
  double slot = static_cast<double>(k) - (static_cast<double>(siblings.size()) - 1) / 2;
  double off = slot * len * 0.25; // tan of a fixed bend angle of about 14 degrees per slot
  Point mid{(a.x + b.x) / 2 + nx * off, (a.y + b.y) / 2 + ny * off};
  return {a, mid, b};
}

std::string save_layout(const Diagram& d, const LayoutPositions& p) {
  std::string out;
  char buf[128];
  for (const auto& n : d.nodes()) {
    auto it = p.pos.find(n.id);
    if (it == p.pos.end()) continue;
    std::snprintf(buf, sizeof buf, " %.17g %.17g\n", it->second.x, it->second.y);
    out += "pos " + n.name + buf;
  }
  for (const auto& n : d.nodes()) {
    if (p.pins.count(n.id)) out += "pin " + n.name + "\n";
  }
  return out;
}

LayoutPositions load_layout(const Diagram& d, const std::string& text) {
  LayoutPositions p;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kw;
    std::string name;
    if (!(ls >> kw >> name)) continue;
    auto hit = d.lookup(name);
    if (!hit || hit->first != ObjectKind::Node) continue;
    if (kw == "pos") {
      double x = 0;
      double y = 0;
      if (ls >> x >> y) p.pos[hit->second] = {x, y};
    } else if (kw == "pin") {
      p.pins.insert(hit->second);
    }
  }
  return p;
}

} // namespace catdiag
