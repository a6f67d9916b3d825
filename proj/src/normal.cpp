#include "catdiag/normal.hpp"

namespace catdiag {

namespace {

void collect(const Term& t, NormOptions opts, std::vector<Term>& out);

// Object an all-identity composite is the identity of.
Term identity_object(const Term& t, NormOptions opts) {
  switch (t.kind()) {
    case TermKind::Id: return canonical(t.child(0), opts);
    case TermKind::Comp: return identity_object(t.child(0), opts);
    case TermKind::FMor: return Term::fobj(canonical(t.child(0), opts), identity_object(t.child(1), opts));
    default: return {};
  }
}

void collect(const Term& t, NormOptions opts, std::vector<Term>& out) {
  switch (t.kind()) {
    case TermKind::Comp:
      collect(t.child(0), opts, out);
      collect(t.child(1), opts, out);
      return;
    case TermKind::Id: return;
    case TermKind::FMor:
      if (opts.functor_laws) {
        Term functor = canonical(t.child(0), opts);
        std::vector<Term> inner;
        collect(t.child(1), opts, inner);
        for (auto& f : inner) out.push_back(Term::fmor(functor, std::move(f)));
        return;
      }
      [[fallthrough]];
    default: {
      std::vector<Term> kids;
      kids.reserve(t.arity());
      for (const auto& c : t.children()) kids.push_back(canonical(c, opts));
      out.push_back(t.with_children(std::move(kids)));
    }
  }
}

bool composite(const Term& t, NormOptions opts) {
  return t.is(TermKind::Comp) || t.is(TermKind::Id) || (opts.functor_laws && t.is(TermKind::FMor));
}

} // namespace

std::vector<Term> factors_of(const Term& t, NormOptions opts) {
  std::vector<Term> out;
  collect(t, opts, out);
  return out;
}

Term canonical(const Term& t, NormOptions opts) {
  if (!t.valid()) return t;
  if (composite(t, opts)) {
    auto fs = factors_of(t, opts);
    if (fs.empty()) return Term::id(identity_object(t, opts));
    return fold(fs, {});
  }
  if (t.arity() == 0) return t;
  std::vector<Term> kids;
  kids.reserve(t.arity());
  for (const auto& c : t.children()) kids.push_back(canonical(c, opts));
  return t.with_children(std::move(kids));
}

Term fold(const std::vector<Term>& factors, const Term& src_when_empty) {
  if (factors.empty()) return Term::id(src_when_empty);
  Term acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = Term::comp(acc, factors[i]);
  return acc;
}

Term fold(const NormalMor& m) { return fold(m.factors, m.src); }

NormalMor concat(const NormalMor& a, const NormalMor& b) {
  NormalMor out{a.cat, a.src, b.dst, a.factors};
  out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
  return out;
}

std::string print(const NormalMor& m) {
  if (m.factors.empty()) return "id " + print(m.src);
  std::string out = "[";
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    if (i) out += ", ";
    out += print(m.factors[i]);
  }
  return out + "]";
}

} // namespace catdiag
