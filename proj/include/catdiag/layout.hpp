#pragma once

#include "catdiag/diagram.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace catdiag {

struct Point {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Node positions in canvas units, keyed by node id.
struct LayoutPositions {
  std::map<int, Point> pos;
  std::set<int> pins;
  std::uint64_t seed = 0;

  friend bool operator==(const LayoutPositions&, const LayoutPositions&) = default;
};

struct LayoutOptions {
  int iterations = 300;
  double width = 800;
  double height = 600;
};

/// FNV-1a over the sorted node labels.
std::uint64_t layout_seed(const Diagram& d, const Context& ctx);

/// Spring-electrical relaxation from `prev` (kept for nodes it knows) or a
/// seeded placement. Pinned nodes never move.
LayoutPositions layout(const Diagram& d, const Context& ctx, const LayoutPositions* prev = nullptr,
                       const LayoutOptions& opts = {});

/// Moves a node, pins it, and relaxes the others.
LayoutPositions drag(const Diagram& d, const Context& ctx, const LayoutPositions& p, int node, Point at,
                     const LayoutOptions& opts = {});
void pin(LayoutPositions& p, const Diagram& d, int node);
void unpin(LayoutPositions& p, const Diagram& d, int node);

/// Drawn shape of an edge: its endpoints, with one bend point when it has
/// parallel siblings (edges between the same two nodes in either direction).
std::vector<Point> edge_polyline(const Diagram& d, const LayoutPositions& p, int edge);

/// Sidecar text: `pos <node> <x> <y>` and `pin <node>` lines.
std::string save_layout(const Diagram& d, const LayoutPositions& p);
/// Reads a sidecar; unknown nodes and malformed lines are skipped.
LayoutPositions load_layout(const Diagram& d, const std::string& text);

} // namespace catdiag
