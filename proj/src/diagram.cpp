#include "catdiag/diagram.hpp"

#include "catdiag/error.hpp"
#include "catdiag/kernel.hpp"
#include "catdiag/parser.hpp"

#include <algorithm>
#include <set>

namespace catdiag {

std::string_view to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::Node: return "node";
    case ObjectKind::Edge: return "edge";
    case ObjectKind::Face: return "face";
  }
  return "object";
}

namespace {

template <class V>
auto* by_id(V& v, int id) {
  auto it = std::find_if(v.begin(), v.end(), [id](const auto& x) { return x.id == id; });
  return it == v.end() ? nullptr : &*it;
}

template <class V>
void erase_id(V& v, int id) {
  v.erase(std::remove_if(v.begin(), v.end(), [id](const auto& x) { return x.id == id; }), v.end());
}

bool plain_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

Term canon(const Context& ctx, const Term& t) { return canonical(ctx.resolve(t), ctx.norm_options()); }

} // namespace

const Node* Diagram::node(int id) const { return by_id(nodes_, id); }
const Edge* Diagram::edge(int id) const { return by_id(edges_, id); }
const Face* Diagram::face(int id) const { return by_id(faces_, id); }
Node* Diagram::node(int id) { return by_id(nodes_, id); }
Edge* Diagram::edge(int id) { return by_id(edges_, id); }
Face* Diagram::face(int id) { return by_id(faces_, id); }

std::optional<std::pair<ObjectKind, int>> Diagram::lookup(const std::string& name) const {
  for (const auto& n : nodes_) {
    if (n.name == name) return std::pair{ObjectKind::Node, n.id};
  }
  for (const auto& e : edges_) {
    if (e.name == name) return std::pair{ObjectKind::Edge, e.id};
  }
  for (const auto& f : faces_) {
    if (f.name == name) return std::pair{ObjectKind::Face, f.id};
  }
  return std::nullopt;
}

const Node& Diagram::node_named(const std::string& name) const {
  auto hit = lookup(name);
  if (!hit || hit->first != ObjectKind::Node) throw Error(Errc::UnknownNode, "no node named '" + name + "'");
  return *node(hit->second);
}

const Edge& Diagram::edge_named(const std::string& name) const {
  auto hit = lookup(name);
  if (!hit || hit->first != ObjectKind::Edge) throw Error(Errc::UnknownEdge, "no edge named '" + name + "'");
  return *edge(hit->second);
}

const Face& Diagram::face_named(const std::string& name) const {
  auto hit = lookup(name);
  if (!hit || hit->first != ObjectKind::Face) throw Error(Errc::UnknownFace, "no face named '" + name + "'");
  return *face(hit->second);
}

bool Diagram::name_taken(const std::string& name) const { return lookup(name).has_value(); }

std::string Diagram::fresh_name(const std::string& base) const {
  if (!name_taken(base)) return base;
  for (int k = 0;; ++k) {
    std::string n = base + "_" + std::to_string(k);
    if (!name_taken(n)) return n;
  }
}

int Diagram::add_node(Term term, std::string name) {
  nodes_.push_back({next_id_, std::move(term), std::move(name)});
  return next_id_++;
}

int Diagram::add_edge(Term term, int src, int dst, std::string name, bool identity) {
  edges_.push_back({next_id_, std::move(term), src, dst, std::move(name), identity});
  return next_id_++;
}

int Diagram::add_face(FaceKind kind, Term eq, int src, int dst, std::vector<int> left, std::vector<int> right,
                      std::string name) {
  faces_.push_back({next_id_, kind, std::move(eq), src, dst, std::move(left), std::move(right), std::move(name)});
  return next_id_++;
}

void Diagram::remove_node(int id) { erase_id(nodes_, id); }
void Diagram::remove_edge(int id) { erase_id(edges_, id); }
void Diagram::remove_face(int id) { erase_id(faces_, id); }

void Diagram::redirect_node(int from, int to) {
  for (auto& e : edges_) {
    if (e.src == from) e.src = to;
    if (e.dst == from) e.dst = to;
  }
  for (auto& f : faces_) {
    if (f.src == from) f.src = to;
    if (f.dst == from) f.dst = to;
  }
}

void Diagram::redirect_edge(int from, const std::vector<int>& path) {
  auto rewrite = [&](std::vector<int>& p) {
    std::vector<int> out;
    for (int e : p) {
      if (e == from) {
        out.insert(out.end(), path.begin(), path.end());
      } else {
        out.push_back(e);
      }
    }
    p = std::move(out);
  };
  for (auto& f : faces_) {
    rewrite(f.left);
    rewrite(f.right);
  }
}

// ---------------------------------------------------------------- queries

std::string sanitize(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') out += c;
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "n" + out;
  return out;
}

int find_node(const Diagram& d, const Context& ctx, const Term& obj) {
  Term want = canon(ctx, obj);
  for (const auto& n : d.nodes()) {
    if (canon(ctx, n.term) == want) return n.id;
  }
  return -1;
}

int ensure_node(Diagram& d, const Context& ctx, const Term& obj) {
  int id = find_node(d, ctx, obj);
  if (id >= 0) return id;
  Term t = canon(ctx, obj);
  return d.add_node(t, d.fresh_name(sanitize(print(t))));
}

Sort face_statement(const Face& f, const Context& ctx) { return ctx.resolve(sort_of(f.eq, ctx)); }

bool face_proved(const Face& f, const Context& ctx) {
  if (f.kind == FaceKind::Hypothesis) return true;
  Term r = ctx.resolve(f.eq);
  if (r.is(TermKind::Meta)) return !ctx.is_open(r.meta_id());
  return true;
}

std::string node_label(const Node& n, const Context& ctx) { return print(ctx.resolve(n.term)); }

std::string edge_label(const Edge& e, const Context& ctx) { return print(ctx.resolve(e.term)); }

std::string face_label(const Face& f, const Context& ctx) { return print(face_statement(f, ctx)); }

NormalMor path_normal(const Diagram& d, const Context& ctx, const std::vector<int>& path, int src) {
  std::vector<Term> terms;
  for (int id : path) {
    const Edge* e = d.edge(id);
    if (!e) throw Error(Errc::UnknownEdge, "path mentions a missing edge");
    terms.push_back(e->term);
  }
  const Node* s = d.node(src);
  if (!s) throw Error(Errc::UnknownNode, "path starts at a missing node");
  return normalize(fold(terms, s->term), ctx, ctx.norm_options());
}

std::vector<const Face*> open_goals(const Diagram& d, const Context& ctx) {
  std::vector<const Face*> out;
  for (const auto& f : d.faces()) {
    if (f.kind == FaceKind::Goal && !face_proved(f, ctx)) out.push_back(&f);
  }
  return out;
}

// ---------------------------------------------------------------- extraction

std::string edge_base_name(const Diagram& d, const Context& ctx, const Term& t, int src, int dst) {
  Term r = ctx.resolve(t);
  if (r.is(TermKind::Const) && plain_identifier(r.name())) return r.name();
  return "m" + d.node(src)->name + d.node(dst)->name;
}

namespace {

int find_edge(const Diagram& d, const Context& ctx, const Term& t, int src, int dst, int except = -1) {
  Term want = canon(ctx, t);
  for (const auto& e : d.edges()) {
    if (e.id != except && e.src == src && e.dst == dst && !e.identity && canon(ctx, e.term) == want) return e.id;
  }
  return -1;
}

int new_edge(Diagram& d, const Context& ctx, const Term& t, int src, int dst) {
  return d.add_edge(t, src, dst, d.fresh_name(edge_base_name(d, ctx, t, src, dst)));
}

// Edges for the factors of `m`, from node `src` to node `dst` (found or
// created from the last factor when negative).
std::vector<int> factor_path(Diagram& d, const Context& ctx, const NormalMor& m, int src, int dst, bool fresh,
                             int except = -1) {
  std::vector<int> path;
  int at = src;
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    const Term& f = m.factors[i];
    Sort s = sort_of(f, ctx);
    int to = i + 1 == m.factors.size() && dst >= 0 ? dst : ensure_node(d, ctx, s.dst());
    int e = fresh ? -1 : find_edge(d, ctx, f, at, to, except);
    if (e < 0) e = new_edge(d, ctx, f, at, to);
    path.push_back(e);
    at = to;
  }
  return path;
}

} // namespace

int add_equation_face(Diagram& d, Context& ctx, FaceKind kind, const Term& eq, const Sort& statement,
                      const std::string& name, bool fresh_edges) {
  auto [l, r] = normalize_sides(ctx.resolve(statement), ctx, ctx.norm_options());
  int s = ensure_node(d, ctx, l.src);
  std::vector<int> left = factor_path(d, ctx, l, s, -1, fresh_edges);
  int t = left.empty() ? ensure_node(d, ctx, l.dst) : d.edge(left.back())->dst;
  std::vector<int> right = factor_path(d, ctx, r, s, t, fresh_edges);
  int id = d.add_face(kind, eq, s, t, std::move(left), std::move(right), d.fresh_name(name));
  if (kind == FaceKind::Goal && l == r && eq.is(TermKind::Meta) && ctx.is_open(eq.meta_id())) {
    ctx.assign_trace(eq.meta_id(), ProofTrace::refl(fold(l)));
  }
  return id;
}

Diagram extract_diagram(Context& ctx) {
  Diagram d;
  for (const auto& g : ctx.goals()) {
    add_equation_face(d, ctx, FaceKind::Goal, Term::meta(g.meta), ctx.meta(g.meta).sort, g.name, true);
  }
  for (const auto& decl : ctx.declarations()) {
    if (decl.kind != DeclKind::Hypothesis) continue;
    add_equation_face(d, ctx, FaceKind::Hypothesis, Term::constant(decl.name), decl.sort, decl.name, true);
  }
  return d;
}

std::string fresh_goal_name(const Diagram& d, const Context& ctx) {
  for (int k = 0;; ++k) {
    std::string n = "Goal-" + std::to_string(k);
    if (!d.name_taken(n) && !ctx.declared(n)) return n;
  }
}

// ---------------------------------------------------------------- merge

namespace {

class Merger {
public:
  Merger(Diagram& d, const Context& ctx, Subst& s) : d_(d), ctx_(ctx), s_(s) {}

  void nodes(int x, int y) {
    if (x == y) return;
    unify_terms(d_.node(x)->term, d_.node(y)->term);
    d_.redirect_node(y, x);
    d_.remove_node(y);
  }

  void edges(int x, int y) {
    if (x == y) return;
    nodes(d_.edge(x)->src, d_.edge(y)->src);
    nodes(d_.edge(x)->dst, d_.edge(y)->dst);
    unify_terms(d_.edge(x)->term, d_.edge(y)->term);
    d_.redirect_edge(y, {x});
    d_.remove_edge(y);
  }

  void faces(int x, int y) {
    if (x == y) return;
    unify_terms(d_.face(x)->eq, d_.face(y)->eq);
    nodes(d_.face(x)->src, d_.face(y)->src);
    nodes(d_.face(x)->dst, d_.face(y)->dst);
    paths(x, y, &Face::left);
    paths(x, y, &Face::right);
    d_.remove_face(y);
  }

private:
  void paths(int x, int y, std::vector<int> Face::*side) {
    if ((d_.face(x)->*side).size() != (d_.face(y)->*side).size()) return;
    for (std::size_t i = 0; i < (d_.face(x)->*side).size(); ++i) {
      edges((d_.face(x)->*side)[i], (d_.face(y)->*side)[i]);
    }
  }

  void unify_terms(const Term& a, const Term& b) {
    UnifyResult r = unify(a, b, s_, ctx_);
    if (!r) {
      throw Error(Errc::UnificationFailed, std::string(to_string(r.error().kind)) + ": " + r.error().detail);
    }
    s_ = r.subst();
  }

  Diagram& d_;
  const Context& ctx_;
  Subst& s_;
};

} // namespace

void merge(Diagram& d, Context& ctx, const std::string& x, const std::string& y) {
  auto hx = d.lookup(x);
  if (!hx) throw Error(Errc::UnknownObject, "no object named '" + x + "'");
  auto hy = d.lookup(y);
  if (!hy) throw Error(Errc::UnknownObject, "no object named '" + y + "'");
  if (hx->first != hy->first) {
    throw Error(Errc::KindMismatch, "cannot merge " + std::string(to_string(hx->first)) + " '" + x + "' with " +
                                        std::string(to_string(hy->first)) + " '" + y + "'");
  }
  Diagram work = d;
  Subst s = ctx.subst();
  Merger m(work, ctx, s);
  switch (hx->first) {
    case ObjectKind::Node: m.nodes(hx->second, hy->second); break;
    case ObjectKind::Edge: m.edges(hx->second, hy->second); break;
    case ObjectKind::Face: m.faces(hx->second, hy->second); break;
  }
  d = std::move(work);
  ctx.subst() = std::move(s);
}

// ---------------------------------------------------------------- compose / split

int compose_path(Diagram& d, Context& ctx, const std::string& name, const std::vector<std::string>& path,
                 const std::string& anchor) {
  if (!name.empty() && (!is_identifier(name) || d.name_taken(name))) {
    throw Error(Errc::DuplicateName, "name '" + name + "' is taken or invalid");
  }
  if (path.empty()) {
    if (anchor.empty()) throw Error(Errc::BrokenPath, "an empty path needs a node");
    const Node& n = d.node_named(anchor);
    Term t = Term::id(n.term);
    return d.add_edge(t, n.id, n.id, name.empty() ? d.fresh_name("id" + n.name) : name, true);
  }
  std::vector<Term> terms;
  int src = -1;
  int at = -1;
  for (const auto& en : path) {
    const Edge& e = d.edge_named(en);
    if (at >= 0 && e.src != at) throw Error(Errc::BrokenPath, "edge '" + en + "' does not start where the path is");
    if (src < 0) src = e.src;
    at = e.dst;
    terms.push_back(e.term);
  }
  Term t = fold(terms, {});
  sort_of(t, ctx);
  std::string n = name.empty() ? d.fresh_name("m" + d.node(src)->name + d.node(at)->name) : name;
  return d.add_edge(t, src, at, n);
}

void split_edge(Diagram& d, Context& ctx, const std::string& name) {
  const Edge& e = d.edge_named(name);
  int id = e.id;
  int src = e.src;
  int dst = e.dst;
  NormalMor m = normalize(e.term, ctx, ctx.norm_options());
  if (m.factors.size() == 1 && canon(ctx, e.term) == m.factors[0]) return;
  std::vector<int> path = m.factors.empty() ? std::vector<int>{} : factor_path(d, ctx, m, src, dst, false, id);
  d.redirect_edge(id, path);
  d.remove_edge(id);
}

// ---------------------------------------------------------------- insertion

int insert_node(Diagram& d, Context& ctx, const std::string& text) {
  Term t = parse_term(text, ctx);
  if (!sort_of(t, ctx).is(SortKind::Obj)) throw Error(Errc::IllSorted, "'" + text + "' is not an object");
  return ensure_node(d, ctx, t);
}

int insert_edge(Diagram& d, Context& ctx, const std::string& text) {
  Term t = parse_term(text, ctx);
  Sort s = sort_of(t, ctx);
  if (!s.is(SortKind::Mor)) throw Error(Errc::IllSorted, "'" + text + "' is not a morphism");
  if (normalize(t, ctx, ctx.norm_options()).factors.empty()) {
    throw Error(Errc::IdentityEdge, "identities are not shown as edges");
  }
  int src = ensure_node(d, ctx, s.src());
  int dst = ensure_node(d, ctx, s.dst());
  return new_edge(d, ctx, t, src, dst);
}

int insert_face(Diagram& d, Context& ctx, const std::string& text) {
  auto v = parse_term_or_equation(text, ctx);
  if (auto* eq = std::get_if<Sort>(&v)) {
    std::string n = fresh_goal_name(d, ctx);
    int meta = ctx.add_goal(n, *eq);
    return add_equation_face(d, ctx, FaceKind::Goal, Term::meta(meta), *eq, n);
  }
  const Term& proof = std::get<Term>(v);
  Sort s = sort_of(proof, ctx);
  if (!s.is(SortKind::Eq)) throw Error(Errc::IllSorted, "'" + text + "' is not a proof of an equality");
  Term head = spine_of(proof).head;
  std::string base = head.is(TermKind::Const) ? head.name() : "p";
  return add_equation_face(d, ctx, FaceKind::Hypothesis, proof, s, sanitize(base));
}

// ---------------------------------------------------------------- audit / json

std::vector<std::string> audit(const Diagram& d, const Context& ctx) {
  std::vector<std::string> bad;
  std::set<std::string> names;
  std::set<int> ids;
  auto named = [&](const std::string& n, int id) {
    if (!names.insert(n).second) bad.push_back("duplicate name " + n);
    if (!ids.insert(id).second) bad.push_back("duplicate id " + std::to_string(id));
  };
  for (const auto& n : d.nodes()) {
    named(n.name, n.id);
    try {
      if (!sort_of(n.term, ctx).is(SortKind::Obj)) bad.push_back("node " + n.name + " is not an object");
    } catch (const Error& e) {
      bad.push_back("node " + n.name + ": " + e.what());
    }
  }
  for (const auto& e : d.edges()) {
    named(e.name, e.id);
    const Node* s = d.node(e.src);
    const Node* t = d.node(e.dst);
    if (!s || !t) {
      bad.push_back("edge " + e.name + " has a missing endpoint");
      continue;
    }
    try {
      Sort st = sort_of(e.term, ctx);
      if (!st.is(SortKind::Mor) || canon(ctx, st.src()) != canon(ctx, s->term) ||
          canon(ctx, st.dst()) != canon(ctx, t->term)) {
        bad.push_back("edge " + e.name + " does not match its endpoints");
      }
      bool empty = normalize(e.term, ctx, ctx.norm_options()).factors.empty();
      if (empty && !e.identity) bad.push_back("edge " + e.name + " is a bare identity");
      if (e.identity && e.src != e.dst) bad.push_back("identity edge " + e.name + " is not a loop");
    } catch (const Error& ex) {
      bad.push_back("edge " + e.name + ": " + ex.what());
    }
  }
  for (const auto& f : d.faces()) {
    named(f.name, f.id);
    if (!d.node(f.src) || !d.node(f.dst)) {
      bad.push_back("face " + f.name + " has a missing endpoint");
      continue;
    }
    auto walk = [&](const std::vector<int>& p, const char* side) {
      int at = f.src;
      for (int id : p) {
        const Edge* e = d.edge(id);
        if (!e) {
          bad.push_back("face " + f.name + " " + side + " mentions a missing edge");
          return false;
        }
        if (e->src != at) {
          bad.push_back("face " + f.name + " " + side + " path is broken at " + e->name);
          return false;
        }
        at = e->dst;
      }
      if (at != f.dst) {
        bad.push_back("face " + f.name + " " + side + " path ends at the wrong node");
        return false;
      }
      return true;
    };
    bool ok = walk(f.left, "left");
    ok = walk(f.right, "right") && ok;
    if (f.kind == FaceKind::Goal && !f.eq.is(TermKind::Meta)) bad.push_back("goal " + f.name + " has no metavariable");
    if (!ok) continue;
    try {
      Sort st = face_statement(f, ctx);
      if (!st.is(SortKind::Eq)) {
        bad.push_back("face " + f.name + " is not an equality");
        continue;
      }
      auto [l, r] = normalize_sides(st, ctx, ctx.norm_options());
      if (path_normal(d, ctx, f.left, f.src) != l) bad.push_back("face " + f.name + " left side disagrees");
      if (path_normal(d, ctx, f.right, f.src) != r) bad.push_back("face " + f.name + " right side disagrees");
    } catch (const Error& ex) {
      bad.push_back("face " + f.name + ": " + ex.what());
    }
  }
  return bad;
}

nlohmann::json to_json(const Diagram& d, const Context& ctx) {
  using nlohmann::json;
  json nodes = json::array();
  for (const auto& n : d.nodes()) nodes.push_back({{"id", n.id}, {"name", n.name}, {"label", node_label(n, ctx)}});
  json edges = json::array();
  for (const auto& e : d.edges()) {
    edges.push_back({{"id", e.id},
                     {"name", e.name},
                     {"label", edge_label(e, ctx)},
                     {"src", e.src},
                     {"dst", e.dst},
                     {"identity", e.identity}});
  }
  json faces = json::array();
  for (const auto& f : d.faces()) {
    faces.push_back({{"id", f.id},
                     {"name", f.name},
                     {"kind", f.kind == FaceKind::Goal ? "goal" : "hypothesis"},
                     {"proved", face_proved(f, ctx)},
                     {"label", face_label(f, ctx)},
                     {"proof", print(ctx.resolve(f.eq))},
                     {"src", f.src},
                     {"dst", f.dst},
                     {"left", f.left},
                     {"right", f.right}});
  }
  return {{"nodes", nodes}, {"edges", edges}, {"faces", faces}};
}

} // namespace catdiag
