#pragma once

#include "catdiag/normal.hpp"
#include "catdiag/sort.hpp"
#include "catdiag/subst.hpp"
#include "catdiag/trace.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace catdiag {

enum class DeclKind : std::uint8_t { Category, Object, Morphism, Functor, Map, Hypothesis, Skolem };

struct Declaration {
  std::string name;
  DeclKind kind;
  Sort sort;
};

enum class Quantifier : std::uint8_t { Forall, Exists };

struct Binder {
  std::string name; // stored with kBinderPrefix
  Sort sort;        // may mention earlier binders as constants
  Quantifier quantifier = Quantifier::Forall;
};

/// A quantified equality. Binder references inside sorts and the conclusion
/// are constants named after the (prefixed) binder.
struct LemmaStatement {
  std::string name;
  std::vector<Binder> binders;
  Sort conclusion; // SortKind::Eq, or Prop for statements we cannot use

  std::size_t forall_count() const;
};

struct GoalDecl {
  std::string name;
  int meta;
};

struct MetaInfo {
  Sort sort;
  std::string origin; // binder or goal name, informational
};

/// The single shared proof context: declarations, metavariables, the global
/// assignment, and the proofs attached to goal metas.
class Context {
public:
  // -- declarations --------------------------------------------------------
  void declare(std::string name, DeclKind kind, Sort sort);
  bool declared(const std::string& name) const;
  const Declaration* find(const std::string& name) const;
  const std::vector<Declaration>& declarations() const { return decls_; }
  std::size_t count(DeclKind kind) const;

  void add_lemma(LemmaStatement lemma);
  const LemmaStatement* lemma(const std::string& name) const;
  const std::vector<LemmaStatement>& lemmas() const { return lemmas_; }

  /// Registers a goal with a fresh EqSort meta and returns the meta id.
  int add_goal(std::string name, const Sort& statement);
  const std::vector<GoalDecl>& goals() const { return goals_; }
  const GoalDecl* goal(const std::string& name) const;
  const GoalDecl* goal_of_meta(int meta) const;

  // -- metavariables -------------------------------------------------------
  int fresh_meta(Sort sort, std::string origin = {});
  const MetaInfo& meta(int id) const { return metas_.at(static_cast<std::size_t>(id)); }
  std::size_t meta_count() const { return metas_.size(); }
  bool meta_exists(int id) const { return id >= 0 && static_cast<std::size_t>(id) < metas_.size(); }

  Subst& subst() { return subst_; }
  const Subst& subst() const { return subst_; }
  Term resolve(const Term& t) const { return subst_.apply(t); }
  Sort resolve(const Sort& s) const { return subst_.apply(s); }

  // -- goal proofs ---------------------------------------------------------
  void assign_trace(int goal_meta, TraceRef trace);
  /// Proof of a goal meta: an explicit trace, or the proof term it was
  /// unified with. Null while the goal is open.
  TraceRef proof_of(int goal_meta) const;
  bool is_open(int goal_meta) const;
  const std::map<int, TraceRef>& traces() const { return traces_; }

  /// Equational theory used by the checker and the solver.
  NormOptions norm_options() const { return norm_; }
  void set_norm_options(NormOptions o) { norm_ = o; }

private:
  NormOptions norm_;
  std::vector<Declaration> decls_;
  std::map<std::string, std::size_t> index_;
  std::vector<LemmaStatement> lemmas_;
  std::vector<GoalDecl> goals_;
  std::vector<MetaInfo> metas_;
  Subst subst_;
  std::map<int, TraceRef> traces_;
};

/// Instantiates a lemma's forall binders with `args` (in order); exists
/// binders become their skolem constants. Returns the binder sorts and
/// conclusion after instantiation.
struct Instantiated {
  std::vector<Sort> binder_sorts; // forall binders only
  Sort conclusion;
};
Instantiated instantiate(const LemmaStatement& lemma, const std::vector<Term>& args);

/// Name of the projection constant standing for the k-th existential binder.
std::string skolem_name(const std::string& lemma, std::size_t k);

} // namespace catdiag
