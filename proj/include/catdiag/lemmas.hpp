#pragma once

#include "catdiag/diagram.hpp"

#include <string>
#include <vector>

namespace catdiag {

/// Empty when the lemma can be used as a diagram pattern, else the reason.
/// Binders must be categories, objects, morphisms, functors, maps or
/// equalities, existentials must come first, and the conclusion must be an
/// equality.
std::string inadmissible_reason(const LemmaStatement& lemma);
bool admissible(const LemmaStatement& lemma);

/// A lemma drawn as a diagram over fresh metavariables.
struct Pattern {
  std::string lemma;
  Diagram diagram;
  std::vector<Term> args;              // one meta per forall binder
  std::string conclusion;              // face name
  std::vector<std::string> premises;   // face names, one per equality binder
  std::vector<int> premise_metas;      // the equality binders' metas
};

/// Allocates fresh metas in `ctx` for the lemma's forall binders. Throws
/// Error{UnknownLemma} or Error{NotAdmissible}.
Pattern pattern_of(Context& ctx, const std::string& lemma);

struct ApplyResult {
  std::vector<std::string> new_goals;  // unmatched premises
  std::string conclusion;              // face carrying the lemma instance
  bool closed_goal = false;            // the conclusion was matched onto a goal
};

/// Pairs pattern objects with diagram objects and keeps the most general
/// unifier of all pairs. Nothing touches the diagram or the context's
/// assignment until `apply`.
class MatchSession {
public:
  MatchSession(Context& ctx, const std::string& lemma);

  const Pattern& pattern() const { return pattern_; }
  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
  const Subst& subst() const { return subst_; }

  /// Adds a pair. Throws Error{KindMismatch}, lookup errors, or
  /// Error{UnificationFailed}; a failed pair leaves the session unchanged.
  void match(const Diagram& target, const std::string& pattern_obj, const std::string& target_obj);
  /// Drops the pair for a pattern object and recomputes the unifier.
  void unmatch(const Diagram& target, const std::string& pattern_obj);

  /// Glues the pattern into `target` along the pairs.
  ApplyResult apply(Diagram& target);

private:
  using Links = std::vector<std::pair<int, int>>; // pattern id, target id

  // Extends `s` and `links` with one pair and what it implies.
  void link(const Diagram& target, int p, int t, Subst& s, Links& links) const;
  void unify_into(Subst& s, const Term& a, const Term& b) const;
  void unify_into(Subst& s, const Sort& a, const Sort& b) const;

  Context& ctx_;
  Pattern pattern_;
  std::vector<std::pair<std::string, std::string>> pairs_;
  Subst subst_;
  Links links_;
};

} // namespace catdiag
