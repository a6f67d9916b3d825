#pragma once

#include "catdiag/context.hpp"
#include "catdiag/normal.hpp"
#include "catdiag/term.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace catdiag {

struct Node {
  int id;
  Term term;
  std::string name;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  int id;
  Term term;
  int src;
  int dst;
  std::string name;
  bool identity = false; // composite of an empty path, shown on demand only

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class FaceKind : std::uint8_t { Hypothesis, Goal };

struct Face {
  int id;
  FaceKind kind;
  Term eq; // proof term for hypotheses, goal meta for goals
  int src;
  int dst;
  std::vector<int> left;
  std::vector<int> right;
  std::string name;

  friend bool operator==(const Face&, const Face&) = default;
};

enum class ObjectKind : std::uint8_t { Node, Edge, Face };
std::string_view to_string(ObjectKind k);

/// The visible proof state. Terms are stored unresolved; read them through
/// the context's assignment.
class Diagram {
public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Face>& faces() const { return faces_; }

  const Node* node(int id) const;
  const Edge* edge(int id) const;
  const Face* face(int id) const;
  Node* node(int id);
  Edge* edge(int id);
  Face* face(int id);

  /// Kind and id of the object called `name`.
  std::optional<std::pair<ObjectKind, int>> lookup(const std::string& name) const;
  const Node& node_named(const std::string& name) const;
  const Edge& edge_named(const std::string& name) const;
  const Face& face_named(const std::string& name) const;

  /// `base`, or `base_k` for the first free k.
  std::string fresh_name(const std::string& base) const;
  bool name_taken(const std::string& name) const;

  int add_node(Term term, std::string name);
  int add_edge(Term term, int src, int dst, std::string name, bool identity = false);
  int add_face(FaceKind kind, Term eq, int src, int dst, std::vector<int> left, std::vector<int> right,
               std::string name);

  void remove_node(int id);
  void remove_edge(int id);
  void remove_face(int id);

  /// Replaces `from` by `to` in every edge endpoint and face endpoint.
  void redirect_node(int from, int to);
  /// Replaces `from` by `path` in every face path.
  void redirect_edge(int from, const std::vector<int>& path);

  int next_id() const { return next_id_; }

  friend bool operator==(const Diagram&, const Diagram&) = default;

private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Face> faces_;
  int next_id_ = 0;
};

// -- extraction and naming -------------------------------------------------

/// `[A-Za-z0-9_]` characters of the printed term, or `n` when nothing is left.
std::string sanitize(const std::string& text);

/// Builds the diagram of every goal (first) and hypothesis of `ctx`. Goals
/// whose sides already agree are proved by reflexivity.
Diagram extract_diagram(Context& ctx);

/// Node whose term equals `obj` (after resolution), or -1.
int find_node(const Diagram& d, const Context& ctx, const Term& obj);
/// Node for `obj`, created if absent.
int ensure_node(Diagram& d, const Context& ctx, const Term& obj);

/// Statement (equality sort) of a face, resolved.
Sort face_statement(const Face& f, const Context& ctx);
bool face_proved(const Face& f, const Context& ctx);

/// Label shown for an object.
std::string node_label(const Node& n, const Context& ctx);
std::string edge_label(const Edge& e, const Context& ctx);
std::string face_label(const Face& f, const Context& ctx);

/// Normal form of the composite of an edge path, anchored at `src`.
NormalMor path_normal(const Diagram& d, const Context& ctx, const std::vector<int>& path, int src);

/// Goal faces not yet proved, in diagram order.
std::vector<const Face*> open_goals(const Diagram& d, const Context& ctx);

// -- operations ---------------------------------------------------------------

/// Unifies the terms of two objects of the same kind and identifies them,
/// keeping `x`. On failure neither `d` nor `ctx` changes.
void merge(Diagram& d, Context& ctx, const std::string& x, const std::string& y);

/// Adds an edge for the composite of `path` (edge names). An empty path needs
/// `anchor`, and yields an identity edge. Returns the new edge id.
int compose_path(Diagram& d, Context& ctx, const std::string& name, const std::vector<std::string>& path,
                 const std::string& anchor = {});

/// Replaces an edge by its factors; identities disappear.
void split_edge(Diagram& d, Context& ctx, const std::string& e);

/// Insertion. Nodes are idempotent; edges must not be identities; a face is
/// given by a proof term (new hypothesis face) or by `lhs = rhs` (new goal).
/// Returns the id of the (possibly existing) object.
int insert_node(Diagram& d, Context& ctx, const std::string& text);
int insert_edge(Diagram& d, Context& ctx, const std::string& text);
int insert_face(Diagram& d, Context& ctx, const std::string& text);

/// Adds a face for `eq`. Paths reuse existing edges with the same term and
/// endpoints unless `fresh_edges` asks for one new edge per factor.
int add_equation_face(Diagram& d, Context& ctx, FaceKind kind, const Term& eq, const Sort& statement,
                      const std::string& name, bool fresh_edges = false);

/// Default name of an edge: the constant's own name when it is a plain
/// identifier, `m<src><dst>` otherwise.
std::string edge_base_name(const Diagram& d, const Context& ctx, const Term& t, int src, int dst);

/// Name for a new goal: `Goal-k` with the first free k.
std::string fresh_goal_name(const Diagram& d, const Context& ctx);

/// Every violated invariant, empty when the diagram is consistent.
std::vector<std::string> audit(const Diagram& d, const Context& ctx);

/// Stable JSON view (labels resolved through `ctx`).
nlohmann::json to_json(const Diagram& d, const Context& ctx);

} // namespace catdiag
