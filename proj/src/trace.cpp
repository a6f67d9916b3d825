#include "catdiag/trace.hpp"

#include "catdiag/context.hpp"
#include "catdiag/kernel.hpp"

#include <set>

namespace catdiag {


TraceRef ProofTrace::refl(Term m) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::Refl;
  t->term_ = std::move(m);
  return t;
}

TraceRef ProofTrace::hypothesis(std::string name) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::Hypothesis;
  t->name_ = std::move(name);
  return t;
}

TraceRef ProofTrace::lemma_instance(std::string lemma, std::vector<Term> args) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::LemmaInstance;
  t->name_ = std::move(lemma);
  t->args_ = std::move(args);
  return t;
}

TraceRef ProofTrace::hole(int goal_meta) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::Hole;
  t->hole_ = goal_meta;
  return t;
}

TraceRef ProofTrace::sym(TraceRef inner) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::Sym;
  t->children_ = {std::move(inner)};
  return t;
}

TraceRef ProofTrace::trans(TraceRef a, TraceRef b) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::Trans;
  t->children_ = {std::move(a), std::move(b)};
  return t;
}

TraceRef ProofTrace::cong_left(NormalMor prefix, TraceRef inner) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::CongLeft;
  t->mor_ = std::move(prefix);
  t->children_ = {std::move(inner)};
  return t;
}

TraceRef ProofTrace::cong_right(TraceRef inner, NormalMor suffix) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::CongRight;
  t->mor_ = std::move(suffix);
  t->children_ = {std::move(inner)};
  return t;
}

TraceRef ProofTrace::norm_step(Term from, NormalMor to) {
  auto t = std::make_shared<ProofTrace>();
  t->kind_ = TraceKind::NormStep;
  t->term_ = std::move(from);
  t->mor_ = std::move(to);
  return t;
}

TraceRef ProofTrace::chain(const std::vector<TraceRef>& steps, const Term& refl_of) {
  if (steps.empty()) return refl(refl_of);
  TraceRef acc = steps.back();
  for (std::size_t i = steps.size() - 1; i-- > 0;) acc = trans(steps[i], acc);
  return acc;
}

TraceRef ProofTrace::with_children(std::vector<TraceRef> kids) const {
  auto t = std::make_shared<ProofTrace>(*this);
  t->children_ = std::move(kids);
  return t;
}

std::string print(const ProofTrace& t) {
  switch (t.kind()) {
    case TraceKind::Refl: return "refl(" + print(t.term()) + ")";
    case TraceKind::Hypothesis: return t.name();
    case TraceKind::LemmaInstance: {
      std::string out = t.name();
      for (const auto& a : t.args()) out += " (" + print(a) + ")";
      return "[" + out + "]";
    }
    case TraceKind::Hole: return "?m" + std::to_string(t.hole());
    case TraceKind::Sym: return "sym(" + print(*t.children()[0]) + ")";
    case TraceKind::Trans: return "trans(" + print(*t.children()[0]) + ", " + print(*t.children()[1]) + ")";
    case TraceKind::CongLeft: return "congl(" + print(t.mor()) + ", " + print(*t.children()[0]) + ")";
    case TraceKind::CongRight: return "congr(" + print(*t.children()[0]) + ", " + print(t.mor()) + ")";
    case TraceKind::NormStep: return "norm(" + print(t.term()) + " ~> " + print(t.mor()) + ")";
  }
  return "?";
}

TraceRef trace_of_proof_term(const Term& t, const Context& ctx) {
  Term r = ctx.resolve(t);
  if (r.is(TermKind::Const)) {
    if (const auto* d = ctx.find(r.name()); d && d->kind == DeclKind::Hypothesis) {
      return ProofTrace::hypothesis(r.name());
    }
    if (const auto* l = ctx.lemma(r.name()); l && l->forall_count() == 0) {
      return ProofTrace::lemma_instance(r.name(), {});
    }
    return nullptr;
  }
  if (r.is(TermKind::Meta)) {
    if (ctx.meta_exists(r.meta_id()) && ctx.meta(r.meta_id()).sort.is(SortKind::Eq)) {
      return ProofTrace::hole(r.meta_id());
    }
    return nullptr;
  }
  if (r.is(TermKind::App)) {
    Spine sp = spine_of(r);
    if (sp.head.is(TermKind::Const) && ctx.lemma(sp.head.name())) {
      return ProofTrace::lemma_instance(sp.head.name(), sp.args);
    }
  }
  return nullptr;
}

namespace {

using Equation = std::pair<NormalMor, NormalMor>;

struct Reject {
  std::string reason;
};

class Checker {
public:
  explicit Checker(const Context& ctx, bool open_holes_ok = false) : ctx_(ctx), open_ok_(open_holes_ok) {}

  Equation conclude(const ProofTrace& t) {
    try {
      return conclude_unchecked(t);
    } catch (const Error& e) {
      throw Reject{std::string(print(t)).substr(0, 200) + ": " + e.what()};
    }
  }

  Equation sides(const Sort& eq) {
    if (!eq.is(SortKind::Eq)) throw Reject{"not an equality: " + print(eq)};
    return normalize_sides(ctx_.resolve(eq), ctx_, ctx_.norm_options());
  }

private:
  NormalMor checked_mor(const NormalMor& m) {
    NormalMor again = normalize(fold(m), ctx_, ctx_.norm_options());
    if (again != m) throw Reject{"malformed path " + print(m)};
    return m;
  }

  Equation conclude_unchecked(const ProofTrace& t) {
    switch (t.kind()) {
      case TraceKind::Refl: {
        NormalMor m = normalize(t.term(), ctx_, ctx_.norm_options());
        return {m, m};
      }
      case TraceKind::Hypothesis: {
        const auto* d = ctx_.find(t.name());
        if (!d || d->kind != DeclKind::Hypothesis) throw Reject{"unknown hypothesis '" + t.name() + "'"};
        return sides(d->sort);
      }
      case TraceKind::LemmaInstance: return lemma(t);
      case TraceKind::Hole: return hole(t.hole());
      case TraceKind::Sym: {
        auto [l, r] = conclude(*t.children().at(0));
        return {r, l};
      }
      case TraceKind::Trans: {
        auto a = conclude(*t.children().at(0));
        auto b = conclude(*t.children().at(1));
        if (a.second != b.first) {
          throw Reject{"transitivity mismatch: " + print(a.second) + " vs " + print(b.first)};
        }
        return {a.first, b.second};
      }
      case TraceKind::CongLeft: {
        NormalMor prefix = checked_mor(t.mor());
        auto [l, r] = conclude(*t.children().at(0));
        if (prefix.dst != l.src || prefix.cat != l.cat) throw Reject{"prefix " + print(prefix) + " does not meet " + print(l)};
        return {concat(prefix, l), concat(prefix, r)};
      }
      case TraceKind::CongRight: {
        NormalMor suffix = checked_mor(t.mor());
        auto [l, r] = conclude(*t.children().at(0));
        if (l.dst != suffix.src || suffix.cat != l.cat) throw Reject{"suffix " + print(suffix) + " does not meet " + print(l)};
        return {concat(l, suffix), concat(r, suffix)};
      }
      case TraceKind::NormStep: {
        NormalMor from = normalize(t.term(), ctx_, ctx_.norm_options());
        if (from != t.mor()) throw Reject{"normal form of " + print(t.term()) + " is not " + print(t.mor())};
        return {from, t.mor()};
      }
    }
    throw Reject{"unknown trace node"};
  }

  Equation lemma(const ProofTrace& t) {
    const auto* l = ctx_.lemma(t.name());
    if (!l) throw Reject{"unknown lemma '" + t.name() + "'"};
    if (t.args().size() != l->forall_count()) throw Reject{"wrong argument count for '" + t.name() + "'"};
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(ctx_.resolve(a));
    Instantiated inst = instantiate(*l, args);
    for (std::size_t i = 0; i < args.size(); ++i) {
      Sort want = ctx_.resolve(inst.binder_sorts[i]);
      if (want.is(SortKind::Eq)) {
        TraceRef premise = trace_of_proof_term(args[i], ctx_);
        if (!premise) throw Reject{"argument " + print(args[i]) + " of '" + t.name() + "' is not a proof"};
        if (conclude(*premise) != sides(want)) {
          throw Reject{"argument " + print(args[i]) + " does not prove " + print(want)};
        }
      } else if (!sort_equal(sort_of(args[i], ctx_), want)) {
        throw Reject{"argument " + print(args[i]) + " of '" + t.name() + "' is not of sort " + print(want)};
      }
    }
    return sides(inst.conclusion);
  }

  Equation hole(int g) {
    if (!ctx_.meta_exists(g) || !ctx_.meta(g).sort.is(SortKind::Eq)) throw Reject{"?m" + std::to_string(g) + " is not a goal"};
    Equation claimed = sides(ctx_.meta(g).sort);
    if (verified_.count(g)) return claimed;
    if (visiting_.count(g)) throw Reject{"cyclic proof through ?m" + std::to_string(g)};
    TraceRef proof = ctx_.proof_of(g);
    if (!proof) {
      if (open_ok_) return claimed;
      throw Reject{"goal ?m" + std::to_string(g) + " is still open"};
    }
    visiting_.insert(g);
    Equation got = conclude(*proof);
    visiting_.erase(g);
    if (got != claimed) throw Reject{"proof of ?m" + std::to_string(g) + " concludes a different equality"};
    verified_.insert(g);
    return claimed;
  }

  const Context& ctx_;
  bool open_ok_;
  std::set<int> visiting_;
  std::set<int> verified_;
};

} // namespace

CheckResult check_trace(const ProofTrace& trace, const Sort& claimed, const Context& ctx, bool open_holes_ok) {
  Checker c(ctx, open_holes_ok);
  try {
    Equation want = c.sides(claimed);
    Equation got = c.conclude(trace);
    if (got != want) {
      return {false, "trace proves " + print(got.first) + " = " + print(got.second) + ", claimed " +
                         print(want.first) + " = " + print(want.second)};
    }
    return {true, {}};
  } catch (const Reject& r) {
    return {false, r.reason};
  } catch (const Error& e) {
    return {false, e.what()};
  }
}

CheckResult check_goal(int goal_meta, const Context& ctx, bool open_holes_ok) {
  if (!ctx.meta_exists(goal_meta)) return {false, "unknown goal"};
  TraceRef proof = ctx.proof_of(goal_meta);
  if (!proof) return {false, "goal is open"};
  return check_trace(*proof, ctx.meta(goal_meta).sort, ctx, open_holes_ok);
}

namespace {

template <class F>
void variants(const TraceRef& t, F&& at_node, std::vector<TraceRef>& out) {
  at_node(t, out);
  const auto& kids = t->children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    std::vector<TraceRef> sub;
    variants(kids[i], at_node, sub);
    for (auto& v : sub) {
      auto copy = kids;
      copy[i] = v;
      out.push_back(t->with_children(std::move(copy)));
    }
  }
}

} // namespace

std::vector<TraceRef> hypothesis_renamings(const TraceRef& t, const std::vector<std::string>& names) {
  std::vector<TraceRef> out;
  variants(
      t,
      [&](const TraceRef& n, std::vector<TraceRef>& acc) {
        if (n->kind() != TraceKind::Hypothesis) return;
        for (const auto& name : names) {
          if (name != n->name()) acc.push_back(ProofTrace::hypothesis(name));
        }
      },
      out);
  return out;
}

std::vector<TraceRef> trans_swaps(const TraceRef& t) {
  std::vector<TraceRef> out;
  variants(
      t,
      [](const TraceRef& n, std::vector<TraceRef>& acc) {
        if (n->kind() == TraceKind::Trans) acc.push_back(ProofTrace::trans(n->children()[1], n->children()[0]));
      },
      out);
  return out;
}

} // namespace catdiag
