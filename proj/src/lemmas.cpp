#include "catdiag/lemmas.hpp"

#include "catdiag/error.hpp"
#include "catdiag/kernel.hpp"

#include <algorithm>
#include <map>

namespace catdiag {

std::string inadmissible_reason(const LemmaStatement& lemma) {
  bool seen_forall = false;
  for (const auto& b : lemma.binders) {
    std::string who = "binder '" + display_name(b.name) + "'";
    switch (b.sort.kind) {
      case SortKind::Cat:
      case SortKind::Obj:
      case SortKind::Mor:
      case SortKind::Funct:
      case SortKind::Map:
      case SortKind::Eq: break;
      default: return who + " has sort " + print(b.sort) + ", which has no diagram shape";
    }
    if (b.quantifier == Quantifier::Forall) {
      seen_forall = true;
    } else if (seen_forall) {
      return "existential " + who + " follows a universal binder";
    }
  }
  if (!lemma.conclusion.is(SortKind::Eq)) return "the conclusion is not an equality of morphisms";
  return {};
}

bool admissible(const LemmaStatement& lemma) { return inadmissible_reason(lemma).empty(); }

Pattern pattern_of(Context& ctx, const std::string& name) {
  const LemmaStatement* lemma = ctx.lemma(name);
  if (!lemma) throw Error(Errc::UnknownLemma, "no lemma named '" + name + "'");
  if (std::string why = inadmissible_reason(*lemma); !why.empty()) {
    throw Error(Errc::NotAdmissible, "lemma '" + name + "' cannot be applied: " + why);
  }
  Pattern p;
  p.lemma = name;

  std::vector<std::pair<std::string, Term>> names;
  std::vector<std::pair<const Binder*, Sort>> forall;
  std::size_t next_exists = 0;
  for (const auto& b : lemma->binders) {
    Sort s = map_terms(b.sort, [&](const Term& t) { return replace_constants(t, names); });
    if (b.quantifier == Quantifier::Exists) {
      names.emplace_back(b.name, Term::constant(skolem_name(name, next_exists++)));
      continue;
    }
    int m = ctx.fresh_meta(s, display_name(b.name));
    p.args.push_back(Term::meta(m));
    names.emplace_back(b.name, Term::meta(m));
    forall.emplace_back(&b, s);
  }
  Instantiated inst = instantiate(*lemma, p.args);

  Diagram& d = p.diagram;
  for (std::size_t i = 0; i < forall.size(); ++i) {
    if (forall[i].second.is(SortKind::Obj)) ensure_node(d, ctx, p.args[i]);
  }
  for (std::size_t i = 0; i < forall.size(); ++i) {
    const Sort& s = forall[i].second;
    if (!s.is(SortKind::Eq)) continue;
    int f = add_equation_face(d, ctx, FaceKind::Hypothesis, p.args[i], s, display_name(forall[i].first->name));
    p.premises.push_back(d.face(f)->name);
    p.premise_metas.push_back(p.args[i].meta_id());
  }
  int c = add_equation_face(d, ctx, FaceKind::Hypothesis, make_spine(Term::constant(name), p.args), inst.conclusion,
                            sanitize(name));
  p.conclusion = d.face(c)->name;
  for (std::size_t i = 0; i < forall.size(); ++i) {
    const Sort& s = forall[i].second;
    if (!s.is(SortKind::Mor)) continue;
    bool drawn = std::any_of(d.edges().begin(), d.edges().end(), [&](const Edge& e) { return e.term == p.args[i]; });
    if (drawn) continue;
    int a = ensure_node(d, ctx, s.src());
    int b = ensure_node(d, ctx, s.dst());
    d.add_edge(p.args[i], a, b, d.fresh_name(edge_base_name(d, ctx, p.args[i], a, b)));
  }

  // Names read better with binder names in place of meta numbers.
  MetaNamer namer = [&](int m) {
    const std::string& origin = ctx.meta(m).origin;
    return origin.empty() ? "m" + std::to_string(m) : origin;
  };
  std::vector<std::string> face_names;
  for (auto& n : d.nodes()) d.node(n.id)->name.clear();
  for (auto& e : d.edges()) d.edge(e.id)->name.clear();
  for (auto& f : d.faces()) {
    face_names.push_back(f.name);
    d.face(f.id)->name.clear();
  }
  for (const auto& n : d.nodes()) {
    d.node(n.id)->name = d.fresh_name(sanitize(print(ctx.resolve(n.term), namer)));
  }
  for (const auto& e : d.edges()) {
    d.edge(e.id)->name = d.fresh_name(edge_base_name(d, ctx, e.term, e.src, e.dst));
  }
  for (std::size_t i = 0; i < d.faces().size(); ++i) {
    std::string old = face_names[i];
    std::string fresh = d.fresh_name(old);
    d.face(d.faces()[i].id)->name = fresh;
    for (auto& pn : p.premises) {
      if (pn == old) pn = fresh;
    }
    if (p.conclusion == old) p.conclusion = fresh;
  }
  return p;
}

// ---------------------------------------------------------------- sessions

MatchSession::MatchSession(Context& ctx, const std::string& lemma)
    : ctx_(ctx), pattern_(pattern_of(ctx, lemma)), subst_(ctx.subst()) {}

void MatchSession::unify_into(Subst& s, const Term& a, const Term& b) const {
  UnifyResult r = unify(a, b, s, ctx_);
  if (!r) throw Error(Errc::UnificationFailed, std::string(to_string(r.error().kind)) + ": " + r.error().detail);
  s = r.subst();
}

void MatchSession::unify_into(Subst& s, const Sort& a, const Sort& b) const {
  UnifyResult r = unify_sorts(a, b, s, ctx_);
  if (!r) throw Error(Errc::UnificationFailed, std::string(to_string(r.error().kind)) + ": " + r.error().detail);
  s = r.subst();
}

void MatchSession::link(const Diagram& target, int p, int t, Subst& s, Links& links) const {
  if (std::find(links.begin(), links.end(), std::pair{p, t}) != links.end()) return;
  const Diagram& pd = pattern_.diagram;
  if (const Node* pn = pd.node(p)) {
    const Node* tn = target.node(t);
    if (!tn) throw Error(Errc::KindMismatch, "pattern node '" + pn->name + "' can only match a node");
    unify_into(s, sort_of(pn->term, ctx_, &s), sort_of(tn->term, ctx_, &s));
    unify_into(s, pn->term, tn->term);
    links.emplace_back(p, t);
    return;
  }
  if (const Edge* pe = pd.edge(p)) {
    const Edge* te = target.edge(t);
    if (!te) throw Error(Errc::KindMismatch, "pattern edge '" + pe->name + "' can only match an edge");
    link(target, pe->src, te->src, s, links);
    link(target, pe->dst, te->dst, s, links);
    unify_into(s, pe->term, te->term);
    links.emplace_back(p, t);
    return;
  }
  const Face* pf = pd.face(p);
  const Face* tf = target.face(t);
  if (!tf) throw Error(Errc::KindMismatch, "pattern face '" + pf->name + "' can only match a face");
  unify_into(s, s.apply(sort_of(pf->eq, ctx_, &s)), s.apply(sort_of(tf->eq, ctx_, &s)));
  unify_into(s, pf->eq, tf->eq);
  link(target, pf->src, tf->src, s, links);
  link(target, pf->dst, tf->dst, s, links);
  links.emplace_back(p, t);
  // Edges along equally long sides correspond when they unify.
  for (auto [pp, tp] : {std::pair{&pf->left, &tf->left}, {&pf->right, &tf->right}}) {
    if (pp->size() != tp->size()) continue;
    Subst s2 = s;
    Links l2 = links;
    try {
      for (std::size_t i = 0; i < pp->size(); ++i) link(target, (*pp)[i], (*tp)[i], s2, l2);
    } catch (const Error&) {
      continue;
    }
    s = std::move(s2);
    links = std::move(l2);
  }
}

void MatchSession::match(const Diagram& target, const std::string& pattern_obj, const std::string& target_obj) {
  auto p = pattern_.diagram.lookup(pattern_obj);
  if (!p) throw Error(Errc::UnknownNode, "the pattern of '" + pattern_.lemma + "' has no object '" + pattern_obj + "'");
  auto t = target.lookup(target_obj);
  if (!t) throw Error(Errc::UnknownNode, "no object named '" + target_obj + "'");
  if (p->first != t->first) {
    throw Error(Errc::KindMismatch, "'" + pattern_obj + "' is a " + std::string(to_string(p->first)) + " but '" +
                                        target_obj + "' is a " + std::string(to_string(t->first)));
  }
  for (const auto& [a, b] : pairs_) {
    if (a == pattern_obj) throw Error(Errc::Refused, "'" + pattern_obj + "' is already matched to '" + b + "'");
  }
  Subst s = subst_;
  Links links = links_;
  link(target, p->second, t->second, s, links);
  subst_ = std::move(s);
  links_ = std::move(links);
  pairs_.emplace_back(pattern_obj, target_obj);
}

void MatchSession::unmatch(const Diagram& target, const std::string& pattern_obj) {
  auto it = std::find_if(pairs_.begin(), pairs_.end(), [&](const auto& pr) { return pr.first == pattern_obj; });
  if (it == pairs_.end()) throw Error(Errc::Refused, "'" + pattern_obj + "' is not matched");
  pairs_.erase(it);
  Subst s = ctx_.subst();
  Links links;
  for (const auto& [a, b] : pairs_) {
    link(target, pattern_.diagram.lookup(a)->second, target.lookup(b)->second, s, links);
  }
  subst_ = std::move(s);
  links_ = std::move(links);
}

ApplyResult MatchSession::apply(Diagram& target) {
  const Diagram& pd = pattern_.diagram;
  ctx_.subst() = subst_;
  std::map<int, int> img;
  for (auto [p, t] : links_) img.emplace(p, t);

  ApplyResult out;
  for (const auto& n : pd.nodes()) {
    if (!img.count(n.id)) img[n.id] = ensure_node(target, ctx_, n.term);
  }
  for (const auto& e : pd.edges()) {
    if (img.count(e.id)) continue;
    int s = img.at(e.src);
    int t = img.at(e.dst);
    Term term = canonical(ctx_.resolve(e.term), ctx_.norm_options());
    img[e.id] = target.add_edge(term, s, t, target.fresh_name(edge_base_name(target, ctx_, term, s, t)), e.identity);
  }
  auto path = [&](const std::vector<int>& p) {
    std::vector<int> q;
    for (int id : p) q.push_back(img.at(id));
    return q;
  };
  for (const auto& f : pd.faces()) {
    auto premise = std::find(pattern_.premises.begin(), pattern_.premises.end(), f.name);
    bool conclusion = f.name == pattern_.conclusion;
    if (img.count(f.id)) {
      if (conclusion) {
        out.closed_goal = target.face(img[f.id])->kind == FaceKind::Goal;
        out.conclusion = target.face(img[f.id])->name;
      }
      continue;
    }
    if (premise != pattern_.premises.end()) {
      int pm = pattern_.premise_metas[static_cast<std::size_t>(premise - pattern_.premises.begin())];
      std::string name = fresh_goal_name(target, ctx_);
      int g = ctx_.add_goal(name, ctx_.resolve(ctx_.meta(pm).sort));
      ctx_.subst().bind(pm, Term::meta(g));
      target.add_face(FaceKind::Goal, Term::meta(g), img.at(f.src), img.at(f.dst), path(f.left), path(f.right), name);
      out.new_goals.push_back(name);
    } else if (conclusion) {
      std::string name = target.fresh_name(sanitize(pattern_.lemma));
      target.add_face(FaceKind::Hypothesis, ctx_.resolve(f.eq), img.at(f.src), img.at(f.dst), path(f.left),
                      path(f.right), name);
      out.conclusion = name;
    }
  }
  return out;
}

} // namespace catdiag
