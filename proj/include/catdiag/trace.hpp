#pragma once

#include "catdiag/normal.hpp"
#include "catdiag/term.hpp"

#include <memory>
#include <string>
#include <vector>

namespace catdiag {

class Context;
struct Sort;

enum class TraceKind : std::uint8_t {
  Refl,
  Hypothesis,
  LemmaInstance,
  Hole, // refers to the proof assigned to a goal metavariable
  Sym,
  Trans,
  CongLeft,
  CongRight,
  NormStep,
};

class ProofTrace;
using TraceRef = std::shared_ptr<const ProofTrace>;

/// Checkable equality proof between morphisms. Immutable; subtrees are shared.
class ProofTrace {
public:
  static TraceRef refl(Term m);
  static TraceRef hypothesis(std::string name);
  static TraceRef lemma_instance(std::string lemma, std::vector<Term> args);
  static TraceRef hole(int goal_meta);
  static TraceRef sym(TraceRef t);
  static TraceRef trans(TraceRef a, TraceRef b);
  static TraceRef cong_left(NormalMor prefix, TraceRef t);
  static TraceRef cong_right(TraceRef t, NormalMor suffix);
  static TraceRef norm_step(Term from, NormalMor to);

  /// Trans-chain of `steps`, or Refl(`refl_of`) when empty.
  static TraceRef chain(const std::vector<TraceRef>& steps, const Term& refl_of);

  TraceKind kind() const { return kind_; }
  const Term& term() const { return term_; }
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }
  int hole() const { return hole_; }
  const NormalMor& mor() const { return mor_; }
  const std::vector<TraceRef>& children() const { return children_; }

  TraceRef with_children(std::vector<TraceRef> kids) const;

private:
  TraceKind kind_ = TraceKind::Refl;
  Term term_;
  std::string name_;
  std::vector<Term> args_;
  int hole_ = -1;
  NormalMor mor_;
  std::vector<TraceRef> children_;
};

std::string print(const ProofTrace& t);

/// Proof term (hypothesis constant, goal meta, or lemma spine) as a trace leaf.
/// Returns null for terms that are not proofs.
TraceRef trace_of_proof_term(const Term& t, const Context& ctx);

struct CheckResult {
  bool accepted = false;
  std::string reason; // first invalid node when rejected

  explicit operator bool() const { return accepted; }
};

/// Trusted checker. Accepts iff `trace` proves `claimed` (an equality sort)
/// from the hypotheses, lemmas and goal proofs recorded in `ctx`, using only
/// symmetry, transitivity, whisker congruence, and the associativity/identity
/// normal form.
CheckResult check_trace(const ProofTrace& trace, const Sort& claimed, const Context& ctx,
                        bool open_holes_ok = false);

/// Checks the proof currently assigned to a goal meta against its sort.
/// With `open_holes_ok`, holes on open goals count as assumptions.
CheckResult check_goal(int goal_meta, const Context& ctx, bool open_holes_ok = false);

/// Mutation helpers used by the robustness tests: every leaf hypothesis name,
/// and every Trans with children swapped.
std::vector<TraceRef> hypothesis_renamings(const TraceRef& t, const std::vector<std::string>& names);
std::vector<TraceRef> trans_swaps(const TraceRef& t);

} // namespace catdiag
