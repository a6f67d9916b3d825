#pragma once

#include "catdiag/diagram.hpp"
#include "catdiag/layout.hpp"
#include "catdiag/trace.hpp"

#include <atomic>
#include <string>
#include <variant>
#include <vector>

namespace catdiag {

struct SolveOptions {
  int depth = 6;                             // rewrite steps per proof
  std::size_t max_states = 2'000'000;        // hard cap on explored words
  const std::atomic<bool>* cancel = nullptr; // polled once per expansion
};

/// Searches for a chain of face rewrites (under pre/post-composition) joining
/// the two sides of a goal face. Pure: nothing is assigned. Returns null when
/// no proof exists within the budget; throws Error{Cancelled}.
TraceRef solve(const Diagram& d, const Context& ctx, const std::string& goal, const SolveOptions& opts = {});

/// solve, then records the trace on the goal. Throws Error{SolveFailed}.
void solve_goal(const Diagram& d, Context& ctx, const std::string& goal, const SolveOptions& opts = {});

// -- decomposition ----------------------------------------------------------

struct SpecBranch {
  std::vector<std::string> left;
  std::vector<std::string> right;

  friend bool operator==(const SpecBranch&, const SpecBranch&) = default;
};

/// A shared edge or a `<left;right>` branch.
using SpecStep = std::variant<std::string, SpecBranch>;

struct FaceSpec {
  std::vector<SpecStep> steps;

  friend bool operator==(const FaceSpec&, const FaceSpec&) = default;
};

/// `mab:<m3;m2>:mcd;mab:<m2;m1>:mcd`. Branch sides list edges separated by `,`.
std::vector<FaceSpec> parse_face_specs(std::string_view text);
std::string print_face_specs(const std::vector<FaceSpec>& specs);

/// Splits a goal into one sub-goal per spec (named `<goal>-0`, `<goal>-1`, ...)
/// and proves it by transitivity through them. When the last spec stops short
/// of the goal's right side, one more sub-goal closes the gap. Sub-goals that
/// an available face settles (up to a common prefix and suffix) are proved on
/// the spot. Returns the names of the sub-goals.
std::vector<std::string> decompose(Diagram& d, Context& ctx, const std::string& goal,
                                   const std::vector<FaceSpec>& specs);

/// Specs for a goal computed from node positions: the bounded regions inside
/// the goal's cycle, swept left to right. Throws Error{NonPlanarPositions}.
std::vector<FaceSpec> planar_specs(const Diagram& d, const Context& ctx, const std::string& goal,
                                   const LayoutPositions& pos);

/// Leaf trace for a face used as an equation (hypothesis proof or goal hole).
TraceRef face_leaf(const Face& f, const Context& ctx);

/// True when the proof of `f` relies, through holes, on goal meta `goal`.
bool face_depends_on(const Face& f, int goal, const Context& ctx);

} // namespace catdiag
