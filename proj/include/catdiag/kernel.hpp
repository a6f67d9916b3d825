#pragma once

#include "catdiag/context.hpp"
#include "catdiag/error.hpp"
#include "catdiag/normal.hpp"
#include "catdiag/sort.hpp"
#include "catdiag/subst.hpp"
#include "catdiag/term.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>

namespace catdiag {

/// Sorts of lemma binders while elaborating a statement.
using LocalScope = std::map<std::string, Sort>;

/// Sort of `t`, computed after resolving metas through `s` (the context's own
/// assignment when null). Throws Error{UndeclaredConstant,
/// IllTypedComposition, IllTypedApplication, IllSorted}.
Sort sort_of(const Term& t, const Context& ctx, const Subst* s = nullptr, const LocalScope* local = nullptr);

/// Equality of sorts with morphism components compared in normal form.
bool sort_equal(const Sort& a, const Sort& b);

/// Normal form of a morphism term with its endpoints.
NormalMor normalize(const Term& t, const Context& ctx, NormOptions opts = {}, const Subst* s = nullptr);

/// Both sides of an equality sort in normal form.
std::pair<NormalMor, NormalMor> normalize_sides(const Sort& eq, const Context& ctx, NormOptions opts = {});

enum class UnifyFailure : std::uint8_t { Clash, OccursCheck, SortMismatch, FactorCountMismatch };
std::string_view to_string(UnifyFailure f);

struct UnifyError {
  UnifyFailure kind;
  std::string detail;
};

/// Either the most general extension of the starting assignment or the reason
/// unification failed.
class UnifyResult {
public:
  UnifyResult(Subst s) : value_(std::move(s)) {}
  UnifyResult(UnifyError e) : value_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<Subst>(value_); }
  explicit operator bool() const { return ok(); }
  const Subst& subst() const { return std::get<Subst>(value_); }
  const UnifyError& error() const { return std::get<UnifyError>(value_); }

private:
  std::variant<Subst, UnifyError> value_;
};

/// First-order unification on normal forms. Composite morphisms unify
/// factor-by-factor when their factor counts agree; a lone flexible factor
/// absorbs a whole composite; every other length mismatch fails. Binding a
/// meta also unifies its sort with the sort of the bound term.
UnifyResult unify(const Term& a, const Term& b, const Subst& start, const Context& ctx);
UnifyResult unify_sorts(const Sort& a, const Sort& b, const Subst& start, const Context& ctx);

} // namespace catdiag
