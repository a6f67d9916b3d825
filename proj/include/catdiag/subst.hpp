#pragma once

#include "catdiag/sort.hpp"
#include "catdiag/term.hpp"

#include <map>
#include <optional>

namespace catdiag {

/// Idempotent metavariable assignment: no bound meta occurs in any value.
class Subst {
public:
  Subst() = default;

  /// Binds `meta` to `value`. The caller guarantees the occurs check; `value`
  /// is resolved against the current bindings first.
  void bind(int meta, const Term& value);

  bool bound(int meta) const { return map_.count(meta) != 0; }
  std::optional<Term> lookup(int meta) const;
  Term apply(const Term& t) const;
  Sort apply(const Sort& s) const;

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<int, Term>& bindings() const { return map_; }

  friend bool operator==(const Subst& a, const Subst& b) { return a.map_ == b.map_; }

private:
  std::map<int, Term> map_;
};

/// Replacement of metas by terms, one pass, no normalisation.
Term substitute(const Term& t, const Subst& s);

} // namespace catdiag
