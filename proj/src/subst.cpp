#include "catdiag/subst.hpp"

namespace catdiag {

namespace {

Term apply_map(const Term& t, const std::map<int, Term>& map) {
  if (!t.valid() || !t.has_meta()) return t;
  if (t.is(TermKind::Meta)) {
    auto it = map.find(t.meta_id());
    return it == map.end() ? t : it->second;
  }
  std::vector<Term> kids;
  kids.reserve(t.arity());
  bool changed = false;
  for (const auto& c : t.children()) {
    kids.push_back(apply_map(c, map));
    changed = changed || kids.back() != c;
  }
  return changed ? t.with_children(std::move(kids)) : t;
}

} // namespace

void Subst::bind(int meta, const Term& value) {
  Term v = apply(value);
  std::map<int, Term> single{{meta, v}};
  for (auto& [k, existing] : map_) existing = apply_map(existing, single);
  map_[meta] = std::move(v);
}

std::optional<Term> Subst::lookup(int meta) const {
  auto it = map_.find(meta);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

Term Subst::apply(const Term& t) const { return map_.empty() ? t : apply_map(t, map_); }

Sort Subst::apply(const Sort& s) const {
  if (map_.empty()) return s;
  return map_terms(s, [this](const Term& t) { return apply(t); });
}

Term substitute(const Term& t, const Subst& s) { return s.apply(t); }

} // namespace catdiag
