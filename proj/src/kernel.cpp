#include "catdiag/kernel.hpp"

namespace catdiag {

namespace {

struct SortComputer {
  const Context& ctx;
  const Subst& s;
  const LocalScope* local;

  [[noreturn]] static void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

  Sort of_const(const Term& t) const {
    if (local) {
      if (auto it = local->find(t.name()); it != local->end()) return s.apply(it->second);
    }
    if (const auto* d = ctx.find(t.name())) return s.apply(d->sort);
    if (const auto* l = ctx.lemma(t.name())) {
      if (l->forall_count() == 0) return s.apply(instantiate(*l, {}).conclusion);
      fail(Errc::IllTypedApplication, "lemma '" + t.name() + "' must be applied to its arguments");
    }
    fail(Errc::UndeclaredConstant, "undeclared constant '" + display_name(t.name()) + "'");
  }

  Sort expect(const Term& t, SortKind k, Errc code, const char* what) const {
    Sort st = compute(t);
    if (st.kind != k) fail(code, "'" + print(t) + "' is not " + what);
    return st;
  }

  Sort compute(const Term& t) const {
    switch (t.kind()) {
      case TermKind::Const: return of_const(t);
      case TermKind::Meta:
        if (!ctx.meta_exists(t.meta_id())) fail(Errc::UndeclaredConstant, "unknown metavariable " + print(t));
        return s.apply(ctx.meta(t.meta_id()).sort);
      case TermKind::Comp: {
        Sort f = expect(t.child(0), SortKind::Mor, Errc::IllTypedComposition, "a morphism");
        Sort g = expect(t.child(1), SortKind::Mor, Errc::IllTypedComposition, "a morphism");
        if (canonical(f.category()) != canonical(g.category()) || canonical(f.dst()) != canonical(g.src())) {
          fail(Errc::IllTypedComposition, "cannot compose '" + print(t.child(0)) + "' (target " + print(f.dst()) +
                                               ") with '" + print(t.child(1)) + "' (source " + print(g.src()) + ")");
        }
        return Sort::mor(f.category(), f.src(), g.dst());
      }
      case TermKind::Id: {
        Sort a = expect(t.child(0), SortKind::Obj, Errc::IllSorted, "an object");
        return Sort::mor(a.category(), t.child(0), t.child(0));
      }
      case TermKind::FObj: {
        Sort f = expect(t.child(0), SortKind::Funct, Errc::IllTypedApplication, "a functor");
        Sort x = expect(t.child(1), SortKind::Obj, Errc::IllTypedApplication, "an object");
        if (canonical(x.category()) != canonical(f.terms[0])) {
          fail(Errc::IllTypedApplication, "functor '" + print(t.child(0)) + "' applied outside its source category");
        }
        return Sort::obj(f.terms[1]);
      }
      case TermKind::FMor: {
        Sort f = expect(t.child(0), SortKind::Funct, Errc::IllTypedApplication, "a functor");
        Sort m = expect(t.child(1), SortKind::Mor, Errc::IllTypedApplication, "a morphism");
        if (canonical(m.category()) != canonical(f.terms[0])) {
          fail(Errc::IllTypedApplication, "functor '" + print(t.child(0)) + "' applied outside its source category");
        }
        return Sort::mor(f.terms[1], Term::fobj(t.child(0), m.src()), Term::fobj(t.child(0), m.dst()));
      }
      case TermKind::App: return of_app(t);
    }
    fail(Errc::IllSorted, "unsortable term");
  }

  Sort of_app(const Term& t) const {
    Spine sp = spine_of(t);
    if (sp.head.is(TermKind::Const) && !(local && local->count(sp.head.name()))) {
      if (const auto* l = ctx.lemma(sp.head.name())) {
        if (sp.args.size() != l->forall_count()) {
          fail(Errc::IllTypedApplication, "lemma '" + l->name + "' expects " + std::to_string(l->forall_count()) +
                                              " arguments, got " + std::to_string(sp.args.size()));
        }
        Instantiated inst = instantiate(*l, sp.args);
        for (std::size_t i = 0; i < sp.args.size(); ++i) {
          Sort got = compute(sp.args[i]);
          if (!sort_equal(got, s.apply(inst.binder_sorts[i]))) {
            fail(Errc::IllTypedApplication, "argument " + std::to_string(i) + " of '" + l->name + "' has sort " +
                                                print(got) + ", expected " + print(inst.binder_sorts[i]));
          }
        }
        return s.apply(inst.conclusion);
      }
    }
    Sort fn = expect(t.child(0), SortKind::Map, Errc::IllTypedApplication, "a map");
    Sort arg = compute(t.child(1));
    if (!sort_equal(arg, fn.sorts[0])) {
      fail(Errc::IllTypedApplication, "'" + print(t.child(0)) + "' expects " + print(fn.sorts[0]) + ", got " +
                                          print(arg));
    }
    return fn.sorts[1];
  }
};

} // namespace

Sort sort_of(const Term& t, const Context& ctx, const Subst* s, const LocalScope* local) {
  const Subst& sub = s ? *s : ctx.subst();
  SortComputer sc{ctx, sub, local};
  return sc.compute(sub.apply(t));
}

bool sort_equal(const Sort& a, const Sort& b) {
  if (a.kind != b.kind || a.terms.size() != b.terms.size() || a.sorts.size() != b.sorts.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    if (canonical(a.terms[i]) != canonical(b.terms[i])) return false;
  }
  for (std::size_t i = 0; i < a.sorts.size(); ++i) {
    if (!sort_equal(a.sorts[i], b.sorts[i])) return false;
  }
  return true;
}

NormalMor normalize(const Term& t, const Context& ctx, NormOptions opts, const Subst* s) {
  const Subst& sub = s ? *s : ctx.subst();
  Term r = sub.apply(t);
  Sort st = sort_of(r, ctx, &sub);
  if (!st.is(SortKind::Mor)) throw Error(Errc::IllSorted, "'" + print(r) + "' is not a morphism");
  return {canonical(st.category(), opts), canonical(st.src(), opts), canonical(st.dst(), opts), factors_of(r, opts)};
}

std::pair<NormalMor, NormalMor> normalize_sides(const Sort& eq, const Context& ctx, NormOptions opts) {
  if (!eq.is(SortKind::Eq)) throw Error(Errc::IllSorted, "not an equality: " + print(eq));
  return {normalize(eq.lhs(), ctx, opts), normalize(eq.rhs(), ctx, opts)};
}

std::string_view to_string(UnifyFailure f) {
  switch (f) {
    case UnifyFailure::Clash: return "Clash";
    case UnifyFailure::OccursCheck: return "OccursCheck";
    case UnifyFailure::SortMismatch: return "SortMismatch";
    case UnifyFailure::FactorCountMismatch: return "FactorCountMismatch";
  }
  return "Unknown";
}

namespace {

class Unifier {
public:
  Unifier(const Context& ctx, Subst start) : ctx_(ctx), s_(std::move(start)) {}

  bool unify(const Term& x, const Term& y) {
    Term a = canonical(s_.apply(x));
    Term b = canonical(s_.apply(y));
    if (a == b) return true;
    if (a.is(TermKind::Meta)) return bind(a.meta_id(), b);
    if (b.is(TermKind::Meta)) return bind(b.meta_id(), a);

    bool composite_a = a.is(TermKind::Comp) || a.is(TermKind::Id);
    bool composite_b = b.is(TermKind::Comp) || b.is(TermKind::Id);
    if (composite_a || composite_b) {
      auto fa = factors_of(a);
      auto fb = factors_of(b);
      if (fa.size() != fb.size()) {
        return fail(UnifyFailure::FactorCountMismatch,
                    "'" + print(a) + "' has " + std::to_string(fa.size()) + " factors, '" + print(b) + "' has " +
                        std::to_string(fb.size()));
      }
      if (fa.empty()) return unify(a.child(0), b.child(0));
      for (std::size_t i = 0; i < fa.size(); ++i) {
        if (!unify(fa[i], fb[i])) return false;
      }
      return true;
    }
    if (a.kind() != b.kind() || a.arity() != b.arity() || a.is(TermKind::Const)) {
      return fail(UnifyFailure::Clash, "cannot unify '" + print(a) + "' with '" + print(b) + "'");
    }
    for (std::size_t i = 0; i < a.arity(); ++i) {
      if (!unify(a.child(i), b.child(i))) return false;
    }
    return true;
  }

  bool unify_sorts(const Sort& x, const Sort& y) {
    if (x.kind != y.kind || x.terms.size() != y.terms.size() || x.sorts.size() != y.sorts.size()) {
      return fail(UnifyFailure::SortMismatch, "sorts '" + print(x) + "' and '" + print(y) + "' differ");
    }
    for (std::size_t i = 0; i < x.terms.size(); ++i) {
      if (!unify(x.terms[i], y.terms[i])) return false;
    }
    for (std::size_t i = 0; i < x.sorts.size(); ++i) {
      if (!unify_sorts(x.sorts[i], y.sorts[i])) return false;
    }
    return true;
  }

  UnifyResult result() && {
    if (error_) return *error_;
    return std::move(s_);
  }

private:
  bool bind(int meta, const Term& t) {
    if (t.contains_meta(meta)) {
      return fail(UnifyFailure::OccursCheck, "?m" + std::to_string(meta) + " occurs in '" + print(t) + "'");
    }
    if (!ctx_.meta_exists(meta)) return fail(UnifyFailure::SortMismatch, "unknown metavariable");
    Sort target;
    try {
      target = sort_of(t, ctx_, &s_);
    } catch (const Error& e) {
      return fail(UnifyFailure::SortMismatch, e.what());
    }
    Sort wanted = s_.apply(ctx_.meta(meta).sort);
    s_.bind(meta, t);
    if (!unify_sorts(wanted, target)) {
      error_->kind = UnifyFailure::SortMismatch;
      return false;
    }
    return true;
  }

  bool fail(UnifyFailure kind, std::string detail) {
    if (!error_) error_ = UnifyError{kind, std::move(detail)};
    return false;
  }

  const Context& ctx_;
  Subst s_;
  std::optional<UnifyError> error_;
};

} // namespace

UnifyResult unify(const Term& a, const Term& b, const Subst& start, const Context& ctx) {
  Unifier u(ctx, start);
  u.unify(a, b);
  return std::move(u).result();
}

UnifyResult unify_sorts(const Sort& a, const Sort& b, const Subst& start, const Context& ctx) {
  Unifier u(ctx, start);
  u.unify_sorts(a, b);
  return std::move(u).result();
}

} // namespace catdiag
