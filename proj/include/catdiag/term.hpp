#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace catdiag {

enum class TermKind : std::uint8_t { Const, Meta, Comp, Id, FObj, FMor, App };

/// Immutable categorical expression. Copies share structure.
///
/// Composition is diagrammatic: `Term::comp(f, g)` means "f then g".
class Term {
public:
  Term() = default;

  static Term constant(std::string name);
  static Term meta(int id);
  static Term comp(Term first, Term second);
  static Term id(Term obj);
  static Term fobj(Term functor, Term obj);
  static Term fmor(Term functor, Term mor);
  static Term app(Term fn, Term arg);

  bool valid() const { return node_ != nullptr; }
  TermKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  int meta_id() const { return node_->meta; }
  std::size_t arity() const { return node_->children.size(); }
  const Term& child(std::size_t i) const { return node_->children[i]; }
  const std::vector<Term>& children() const { return node_->children; }

  /// Same constructor over new children.
  Term with_children(std::vector<Term> kids) const;

  bool is(TermKind k) const { return valid() && kind() == k; }
  bool has_meta() const { return node_->has_meta; }
  bool contains_meta(int id) const;
  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }
  static int compare(const Term& a, const Term& b);

private:
  struct Node {
    TermKind kind;
    std::string name;
    int meta = -1;
    std::vector<Term> children;
    std::size_t hash = 0;
    bool has_meta = false;
  };
  static Term make(TermKind kind, std::string name, int meta, std::vector<Term> children);

  std::shared_ptr<const Node> node_;
};

/// Head constant and arguments of an application spine `((h a1) a2) ...`.
struct Spine {
  Term head;
  std::vector<Term> args;
};
Spine spine_of(const Term& t);
Term make_spine(const Term& head, const std::vector<Term>& args);

/// Lemma binders are stored as constants with this prefix so they never clash
/// with user declarations.
inline constexpr char kBinderPrefix = '$';
inline bool is_binder_name(const std::string& n) { return !n.empty() && n.front() == kBinderPrefix; }
std::string display_name(const std::string& n);

/// Replaces every constant named in `names` by the paired term.
Term replace_constants(const Term& t, const std::vector<std::pair<std::string, Term>>& names);

void collect_metas(const Term& t, std::vector<int>& out);

using MetaNamer = std::function<std::string(int)>;

/// Canonical text form, re-parseable by the term parser given the same context.
/// Metas print as `?m<id>` unless `meta_name` is supplied.
std::string print(const Term& t, const MetaNamer& meta_name = {});

} // namespace catdiag

template <>
struct std::hash<catdiag::Term> {
  std::size_t operator()(const catdiag::Term& t) const noexcept { return t.hash(); }
};
