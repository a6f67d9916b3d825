#pragma once

#include "catdiag/term.hpp"

#include <vector>

namespace catdiag {

/// Composition normal form of a morphism: a flat list of atomic factors with
/// all identities removed. An empty list is the identity on `src` (= `dst`).
struct NormalMor {
  Term cat;
  Term src;
  Term dst;
  std::vector<Term> factors;

  bool identity() const { return factors.empty(); }

  friend bool operator==(const NormalMor& a, const NormalMor& b) {
    return a.src == b.src && a.dst == b.dst && a.factors == b.factors && a.cat == b.cat;
  }
  friend bool operator!=(const NormalMor& a, const NormalMor& b) { return !(a == b); }
};

struct NormOptions {
  /// Push functors through compositions and identities.
  bool functor_laws = false;
};

/// Flattens compositions and removes identities, recursively canonicalising
/// the arguments of every factor. Needs no sort information.
std::vector<Term> factors_of(const Term& t, NormOptions opts = {});

/// Representative of `t` modulo associativity and identity laws: the
/// left-nested fold of its factors, `Id(obj)` when there are none, and for
/// non-composite terms the same constructor over canonical children.
Term canonical(const Term& t, NormOptions opts = {});

/// Left-nested composition of the factors, or `Id(src)`.
Term fold(const NormalMor& m);
Term fold(const std::vector<Term>& factors, const Term& src_when_empty);

/// `a` followed by `b`; endpoints are taken from the operands.
NormalMor concat(const NormalMor& a, const NormalMor& b);

std::string print(const NormalMor& m);

} // namespace catdiag
