#pragma once

#include "catdiag/term.hpp"

#include <string>
#include <vector>

namespace catdiag {

enum class SortKind : std::uint8_t { Cat, Obj, Mor, Funct, Eq, Map, Prop };

/// The fixed family of sorts terms may inhabit. `Prop` is only parsed so that
/// non-categorical lemma statements can be recognised and rejected.
struct Sort {
  SortKind kind = SortKind::Cat;
  std::vector<Term> terms; // Obj: cat | Mor: cat,src,dst | Funct: src,dst | Eq: cat,src,dst,lhs,rhs
  std::vector<Sort> sorts; // Map: arg,res

  static Sort cat() { return {SortKind::Cat, {}, {}}; }
  static Sort prop() { return {SortKind::Prop, {}, {}}; }
  static Sort obj(Term c) { return {SortKind::Obj, {std::move(c)}, {}}; }
  static Sort mor(Term c, Term src, Term dst) {
    return {SortKind::Mor, {std::move(c), std::move(src), std::move(dst)}, {}};
  }
  static Sort funct(Term src, Term dst) { return {SortKind::Funct, {std::move(src), std::move(dst)}, {}}; }
  static Sort eq(Term c, Term src, Term dst, Term lhs, Term rhs) {
    return {SortKind::Eq, {std::move(c), std::move(src), std::move(dst), std::move(lhs), std::move(rhs)}, {}};
  }
  static Sort map(Sort arg, Sort res) { return {SortKind::Map, {}, {std::move(arg), std::move(res)}}; }

  const Term& category() const { return terms.at(0); }
  const Term& src() const { return terms.at(1); }
  const Term& dst() const { return terms.at(2); }
  const Term& lhs() const { return terms.at(3); }
  const Term& rhs() const { return terms.at(4); }

  bool is(SortKind k) const { return kind == k; }

  friend bool operator==(const Sort& a, const Sort& b) {
    return a.kind == b.kind && a.terms == b.terms && a.sorts == b.sorts;
  }
};

template <class F>
Sort map_terms(const Sort& s, F&& f) {
  Sort out{s.kind, {}, {}};
  out.terms.reserve(s.terms.size());
  for (const auto& t : s.terms) out.terms.push_back(f(t));
  for (const auto& sub : s.sorts) out.sorts.push_back(map_terms(sub, f));
  return out;
}

std::string print(const Sort& s, const MetaNamer& meta_name = {});

} // namespace catdiag
