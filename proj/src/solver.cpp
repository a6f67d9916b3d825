#include "catdiag/solver.hpp"

#include "catdiag/error.hpp"
#include "catdiag/kernel.hpp"
#include "catdiag/parser.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace catdiag {

TraceRef face_leaf(const Face& f, const Context& ctx) {
  if (TraceRef t = trace_of_proof_term(f.eq, ctx)) return t;
  throw Error(Errc::IllSorted, "face '" + f.name + "' has no usable proof");
}

namespace {

class Dependency {
public:
  Dependency(const Context& ctx, int goal) : ctx_(ctx), goal_(goal) {}

  bool trace(const TraceRef& t) {
    if (!t) return false;
    switch (t->kind()) {
      case TraceKind::Hole: return hole(t->hole());
      case TraceKind::LemmaInstance:
        for (const auto& a : t->args()) {
          std::vector<int> ms;
          collect_metas(ctx_.resolve(a), ms);
          for (int m : ms) {
            if (ctx_.meta(m).sort.is(SortKind::Eq) && hole(m)) return true;
          }
        }
        return false;
      default:
        for (const auto& c : t->children()) {
          if (trace(c)) return true;
        }
        return false;
    }
  }

  bool hole(int m) {
    if (m == goal_) return true;
    if (!seen_.insert(m).second) return false;
    return trace(ctx_.proof_of(m));
  }

private:
  const Context& ctx_;
  int goal_;
  std::set<int> seen_;
};

} // namespace

bool face_depends_on(const Face& f, int goal, const Context& ctx) {
  Term r = ctx.resolve(f.eq);
  if (r.is(TermKind::Meta)) return Dependency(ctx, goal).hole(r.meta_id());
  return Dependency(ctx, goal).trace(trace_of_proof_term(r, ctx));
}

namespace {

struct Rule {
  NormalMor from;
  NormalMor to;
  TraceRef proof; // from = to
};

struct WordHash {
  std::size_t operator()(const std::vector<Term>& w) const noexcept {
    std::size_t h = w.size();
    for (const auto& t : w) h = h * 1000003u ^ t.hash();
    return h;
  }
};

// Faces usable as equations while working on goal meta `goal`.
std::vector<Rule> rules_for(const Diagram& d, const Context& ctx, const std::set<int>& avoid) {
  std::vector<Rule> out;
  for (const auto& f : d.faces()) {
    if (!face_proved(f, ctx)) continue;
    bool bad = false;
    for (int g : avoid) bad = bad || face_depends_on(f, g, ctx);
    if (bad) continue;
    auto [l, r] = normalize_sides(face_statement(f, ctx), ctx, ctx.norm_options());
    if (l == r) continue;
    TraceRef leaf = face_leaf(f, ctx);
    out.push_back({l, r, leaf});
    out.push_back({r, l, ProofTrace::sym(leaf)});
  }
  return out;
}

class Search {
public:
  Search(const Context& ctx, const NormalMor& goal_left, const NormalMor& goal_right, std::vector<Rule> rules,
         const SolveOptions& opts)
      : ctx_(ctx), cat_(goal_left.cat), src_(goal_left.src), dst_(goal_left.dst), rules_(std::move(rules)),
        opts_(opts) {
    sides_[0].add(goal_left.factors, -1, nullptr);
    sides_[1].add(goal_right.factors, -1, nullptr);
  }

  TraceRef run() {
    if (sides_[0].states[0].word == sides_[1].states[0].word) {
      return ProofTrace::refl(fold(sides_[0].states[0].word, src_));
    }
    while (sides_[0].depth + sides_[1].depth < opts_.depth) {
      int s = sides_[1].frontier.size() < sides_[0].frontier.size() ? 1 : 0;
      if (sides_[s].frontier.empty()) return nullptr;
      if (TraceRef t = expand(s)) return t;
    }
    return nullptr;
  }

private:
  struct State {
    std::vector<Term> word;
    int parent;
    TraceRef step; // parent word = this word
  };

  struct Side {
    std::vector<State> states;
    std::unordered_map<std::vector<Term>, int, WordHash> index;
    std::vector<int> frontier;
    int depth = 0;

    int add(std::vector<Term> w, int parent, TraceRef step) {
      int id = static_cast<int>(states.size());
      index.emplace(w, id);
      states.push_back({std::move(w), parent, std::move(step)});
      frontier.push_back(id);
      return id;
    }
  };

  // Objects at positions 0..n of a word.
  std::vector<Term> objects(const std::vector<Term>& w) {
    std::vector<Term> out{src_};
    for (const auto& f : w) out.push_back(ends(f).second);
    return out;
  }

  std::pair<Term, Term> ends(const Term& f) {
    auto it = ends_.find(f);
    if (it != ends_.end()) return it->second;
    NormalMor n = normalize(f, ctx_, ctx_.norm_options());
    return ends_[f] = {n.src, n.dst};
  }

  NormalMor piece(const std::vector<Term>& w, const std::vector<Term>& obj, std::size_t a, std::size_t b) const {
    return {cat_, obj[a], obj[b], std::vector<Term>(w.begin() + static_cast<long>(a), w.begin() + static_cast<long>(b))};
  }

  TraceRef expand(int s) {
    Side& me = sides_[s];
    Side& other = sides_[1 - s];
    std::vector<int> frontier = std::move(me.frontier);
    me.frontier.clear();
    ++me.depth;
    for (int id : frontier) {
      if (opts_.cancel && opts_.cancel->load()) throw Error(Errc::Cancelled, "solve cancelled");
      std::vector<Term> w = me.states[id].word;
      std::vector<Term> obj = objects(w);
      for (const auto& rule : rules_) {
        std::size_t len = rule.from.factors.size();
        if (len > w.size()) continue;
        for (std::size_t i = 0; i + len <= w.size(); ++i) {
          if (len == 0) {
            if (obj[i] != rule.from.src) continue;
          } else if (!std::equal(rule.from.factors.begin(), rule.from.factors.end(), w.begin() + static_cast<long>(i))) {
            continue;
          }
          std::vector<Term> next(w.begin(), w.begin() + static_cast<long>(i));
          next.insert(next.end(), rule.to.factors.begin(), rule.to.factors.end());
          next.insert(next.end(), w.begin() + static_cast<long>(i + len), w.end());
          if (me.index.count(next)) continue;
          TraceRef step = rule.proof;
          if (i + len < w.size()) step = ProofTrace::cong_right(step, piece(w, obj, i + len, w.size()));
          if (i > 0) step = ProofTrace::cong_left(piece(w, obj, 0, i), step);
          int nid = me.add(next, id, step);
          if (auto hit = other.index.find(next); hit != other.index.end()) {
            return s == 0 ? join(nid, hit->second) : join(hit->second, nid);
          }
          if (states() > opts_.max_states) return nullptr;
        }
      }
    }
    return nullptr;
  }

  std::size_t states() const { return sides_[0].states.size() + sides_[1].states.size(); }

  // Forward state f and backward state b hold the same word.
  TraceRef join(int f, int b) {
    std::vector<TraceRef> steps;
    for (int at = f; sides_[0].states[at].parent >= 0; at = sides_[0].states[at].parent) {
      steps.push_back(sides_[0].states[at].step);
    }
    std::reverse(steps.begin(), steps.end());
    for (int at = b; sides_[1].states[at].parent >= 0; at = sides_[1].states[at].parent) {
      steps.push_back(ProofTrace::sym(sides_[1].states[at].step));
    }
    return ProofTrace::chain(steps, fold(sides_[0].states[0].word, src_));
  }

  const Context& ctx_;
  Term cat_;
  Term src_;
  Term dst_;
  std::vector<Rule> rules_;
  SolveOptions opts_;
  Side sides_[2];
  std::unordered_map<Term, std::pair<Term, Term>> ends_;
};

const Face& open_goal_face(const Diagram& d, const Context& ctx, const std::string& goal) {
  auto hit = d.lookup(goal);
  if (!hit) throw Error(Errc::UnknownGoal, "no goal named '" + goal + "'");
  const Face* f = hit->first == ObjectKind::Face ? d.face(hit->second) : nullptr;
  if (!f || f->kind != FaceKind::Goal) throw Error(Errc::NotAGoal, "'" + goal + "' is not a goal");
  if (face_proved(*f, ctx)) throw Error(Errc::NotAGoal, "goal '" + goal + "' is already proved");
  return *f;
}

int goal_meta(const Face& f, const Context& ctx) {
  Term r = ctx.resolve(f.eq);
  if (!r.is(TermKind::Meta)) throw Error(Errc::NotAGoal, "'" + f.name + "' is not an open goal");
  return r.meta_id();
}

} // namespace

TraceRef solve(const Diagram& d, const Context& ctx, const std::string& goal, const SolveOptions& opts) {
  const Face& g = open_goal_face(d, ctx, goal);
  int meta = goal_meta(g, ctx);
  auto [l, r] = normalize_sides(face_statement(g, ctx), ctx, ctx.norm_options());
  Search search(ctx, l, r, rules_for(d, ctx, {meta}), opts);
  return search.run();
}

void solve_goal(const Diagram& d, Context& ctx, const std::string& goal, const SolveOptions& opts) {
  TraceRef t = solve(d, ctx, goal, opts);
  if (!t) {
    throw Error(Errc::SolveFailed, "no proof of '" + goal + "' within " + std::to_string(opts.depth) + " steps");
  }
  const Face& g = d.face_named(goal);
  int meta = goal_meta(g, ctx);
  CheckResult c = check_trace(*t, face_statement(g, ctx), ctx);
  if (!c) throw Error(Errc::SolveFailed, "internal: solver trace rejected: " + c.reason);
  ctx.assign_trace(meta, t);
}

// ---------------------------------------------------------------- face specs

std::vector<FaceSpec> parse_face_specs(std::string_view text) {
  std::vector<FaceSpec> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) -> SyntaxError {
    return SyntaxError(1, static_cast<int>(i) + 1, msg);
  };
  auto skip = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  auto name = [&] {
    skip();
    std::size_t j = i;
    while (j < text.size() && std::string_view(":;,<> \t").find(text[j]) == std::string_view::npos) ++j;
    std::string n(text.substr(i, j - i));
    if (!is_identifier(n)) throw fail("expected an edge name");
    i = j;
    skip();
    return n;
  };
  auto side = [&](char stop) {
    std::vector<std::string> names;
    skip();
    if (i < text.size() && text[i] == stop) return names;
    names.push_back(name());
    while (i < text.size() && text[i] == ',') {
      ++i;
      names.push_back(name());
    }
    return names;
  };
  skip();
  if (i == text.size()) return out;
  for (;;) {
    FaceSpec spec;
    for (;;) {
      skip();
      if (i < text.size() && text[i] == '<') {
        ++i;
        SpecBranch b;
        b.left = side(';');
        if (i >= text.size() || text[i] != ';') throw fail("expected ';' inside branch");
        ++i;
        b.right = side('>');
        if (i >= text.size() || text[i] != '>') throw fail("expected '>'");
        ++i;
        skip();
        spec.steps.emplace_back(std::move(b));
      } else {
        spec.steps.emplace_back(name());
      }
      if (i < text.size() && text[i] == ':') {
        ++i;
        continue;
      }
      break;
    }
    out.push_back(std::move(spec));
    if (i == text.size()) break;
    if (text[i] != ';') throw fail("expected ':' or ';'");
    ++i;
  }
  return out;
}

std::string print_face_specs(const std::vector<FaceSpec>& specs) {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  std::string out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (i) out += ";";
    for (std::size_t j = 0; j < specs[i].steps.size(); ++j) {
      if (j) out += ":";
      const auto& st = specs[i].steps[j];
      if (const auto* e = std::get_if<std::string>(&st)) {
        out += *e;
      } else {
        const auto& b = std::get<SpecBranch>(st);
        out += "<" + join(b.left) + ";" + join(b.right) + ">";
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- decompose

namespace {

std::vector<int> edge_ids(const Diagram& d, const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& n : names) out.push_back(d.edge_named(n).id);
  return out;
}

bool continuous(const Diagram& d, const std::vector<int>& path, int src, int dst) {
  int at = src;
  for (int id : path) {
    const Edge* e = d.edge(id);
    if (e->src != at) return false;
    at = e->dst;
  }
  return at == dst;
}

// Proves `sub` from a single available face, up to a shared prefix/suffix.
TraceRef discharge(const NormalMor& l, const NormalMor& r, const std::vector<Rule>& rules) {
  if (l == r) return ProofTrace::refl(fold(l));
  std::size_t p = 0;
  while (p < l.factors.size() && p < r.factors.size() && l.factors[p] == r.factors[p]) ++p;
  std::size_t s = 0;
  while (s < l.factors.size() - p && s < r.factors.size() - p &&
         l.factors[l.factors.size() - 1 - s] == r.factors[r.factors.size() - 1 - s]) {
    ++s;
  }
  auto slice = [](const NormalMor& m, std::size_t a, std::size_t b, const Term& from, const Term& to) {
    return NormalMor{m.cat, from, to,
                     std::vector<Term>(m.factors.begin() + static_cast<long>(a), m.factors.begin() + static_cast<long>(b))};
  };
  for (const auto& rule : rules) {
    const NormalMor& f = rule.from;
    const NormalMor& t = rule.to;
    if (f.factors.size() != l.factors.size() - p - s || t.factors.size() != r.factors.size() - p - s) continue;
    if (!std::equal(f.factors.begin(), f.factors.end(), l.factors.begin() + static_cast<long>(p))) continue;
    if (!std::equal(t.factors.begin(), t.factors.end(), r.factors.begin() + static_cast<long>(p))) continue;
    TraceRef step = rule.proof;
    if (s > 0) step = ProofTrace::cong_right(step, slice(l, l.factors.size() - s, l.factors.size(), f.dst, l.dst));
    if (p > 0) step = ProofTrace::cong_left(slice(l, 0, p, l.src, f.src), step);
    return step;
  }
  return nullptr;
}

} // namespace

std::vector<std::string> decompose(Diagram& d, Context& ctx, const std::string& goal,
                                   const std::vector<FaceSpec>& specs) {
  const Face g = open_goal_face(d, ctx, goal);
  int meta = goal_meta(g, ctx);
  Sort statement = face_statement(g, ctx);

  std::vector<std::pair<std::vector<int>, std::vector<int>>> pieces;
  for (const auto& spec : specs) {
    std::vector<int> left;
    std::vector<int> right;
    for (const auto& st : spec.steps) {
      if (const auto* e = std::get_if<std::string>(&st)) {
        int id = d.edge_named(*e).id;
        left.push_back(id);
        right.push_back(id);
      } else {
        const auto& b = std::get<SpecBranch>(st);
        auto l = edge_ids(d, b.left);
        auto r = edge_ids(d, b.right);
        left.insert(left.end(), l.begin(), l.end());
        right.insert(right.end(), r.begin(), r.end());
      }
    }
    if (!continuous(d, left, g.src, g.dst) || !continuous(d, right, g.src, g.dst)) {
      throw Error(Errc::NonChainingSpecs, "spec " + std::to_string(pieces.size()) + " does not span the goal");
    }
    pieces.emplace_back(std::move(left), std::move(right));
  }
  if (pieces.empty()) {
    if (path_normal(d, ctx, g.left, g.src) != path_normal(d, ctx, g.right, g.src)) {
      throw Error(Errc::NonChainingSpecs, "no specs given and the sides of '" + goal + "' differ");
    }
    ctx.assign_trace(meta, ProofTrace::refl(fold(path_normal(d, ctx, g.left, g.src))));
    return {};
  }
  if (pieces.front().first != g.left) {
    throw Error(Errc::NonChainingSpecs, "the first spec does not start from the left side of '" + goal + "'");
  }
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    if (pieces[i].second != pieces[i + 1].first) {
      throw Error(Errc::NonChainingSpecs, "spec " + std::to_string(i) + " does not end where spec " +
                                              std::to_string(i + 1) + " starts");
    }
  }
  if (pieces.back().second != g.right) pieces.emplace_back(pieces.back().second, g.right);

  std::vector<std::string> names;
  std::vector<int> metas;
  std::vector<TraceRef> holes;
  int k = 0;
  for (const auto& [left, right] : pieces) {
    std::string n;
    do {
      n = goal + "-" + std::to_string(k++);
    } while (d.name_taken(n) || ctx.declared(n));
    auto terms = [&](const std::vector<int>& p) {
      std::vector<Term> ts;
      for (int id : p) ts.push_back(d.edge(id)->term);
      return fold(ts, statement.src());
    };
    Sort st = Sort::eq(statement.category(), statement.src(), statement.dst(), terms(left), terms(right));
    int m = ctx.add_goal(n, st);
    d.add_face(FaceKind::Goal, Term::meta(m), g.src, g.dst, left, right, n);
    names.push_back(n);
    metas.push_back(m);
    holes.push_back(ProofTrace::hole(m));
  }
  ctx.assign_trace(meta, ProofTrace::chain(holes, {}));

  std::set<int> avoid(metas.begin(), metas.end());
  avoid.insert(meta);
  std::vector<Rule> rules = rules_for(d, ctx, avoid);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const Face& sub = d.face_named(names[i]);
    NormalMor l = path_normal(d, ctx, sub.left, sub.src);
    NormalMor r = path_normal(d, ctx, sub.right, sub.src);
    if (TraceRef t = discharge(l, r, rules)) ctx.assign_trace(metas[i], t);
  }
  return names;
}

} // namespace catdiag
