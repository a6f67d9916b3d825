#include "catdiag/term.hpp"

#include <algorithm>

namespace catdiag {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace

Term Term::make(TermKind kind, std::string name, int meta, std::vector<Term> children) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->name = std::move(name);
  node->meta = meta;
  std::size_t h = mix(static_cast<std::size_t>(kind), std::hash<std::string>{}(node->name));
  h = mix(h, static_cast<std::size_t>(meta + 1));
  bool has_meta = kind == TermKind::Meta;
  for (const auto& c : children) {
    h = mix(h, c.hash());
    has_meta = has_meta || c.has_meta();
  }
  node->children = std::move(children);
  node->hash = h;
  node->has_meta = has_meta;
  Term t;
  t.node_ = std::move(node);
  return t;
}

Term Term::constant(std::string name) { return make(TermKind::Const, std::move(name), -1, {}); }
Term Term::meta(int id) { return make(TermKind::Meta, {}, id, {}); }
Term Term::comp(Term first, Term second) {
  return make(TermKind::Comp, {}, -1, {std::move(first), std::move(second)});
}
Term Term::id(Term obj) { return make(TermKind::Id, {}, -1, {std::move(obj)}); }
Term Term::fobj(Term functor, Term obj) {
  return make(TermKind::FObj, {}, -1, {std::move(functor), std::move(obj)});
}
Term Term::fmor(Term functor, Term mor) {
  return make(TermKind::FMor, {}, -1, {std::move(functor), std::move(mor)});
}
Term Term::app(Term fn, Term arg) { return make(TermKind::App, {}, -1, {std::move(fn), std::move(arg)}); }

Term Term::with_children(std::vector<Term> kids) const {
  if (arity() == 0) return *this;
  return make(kind(), name(), meta_id(), std::move(kids));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash()) return false;
  return Term::compare(a, b) == 0;
}

int Term::compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return 0;
  if (!a.node_) return -1;
  if (!b.node_) return 1;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (a.meta_id() != b.meta_id()) return a.meta_id() < b.meta_id() ? -1 : 1;
  if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
  if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (int c = compare(a.child(i), b.child(i)); c != 0) return c;
  }
  return 0;
}

bool Term::contains_meta(int id) const {
  if (!has_meta()) return false;
  if (kind() == TermKind::Meta) return meta_id() == id;
  return std::any_of(children().begin(), children().end(),
                     [id](const Term& c) { return c.contains_meta(id); });
}

Spine spine_of(const Term& t) {
  Spine s;
  Term cur = t;
  while (cur.is(TermKind::App)) {
    s.args.push_back(cur.child(1));
    cur = cur.child(0);
  }
  std::reverse(s.args.begin(), s.args.end());
  s.head = cur;
  return s;
}

Term make_spine(const Term& head, const std::vector<Term>& args) {
  Term t = head;
  for (const auto& a : args) t = Term::app(t, a);
  return t;
}

std::string display_name(const std::string& n) { return is_binder_name(n) ? n.substr(1) : n; }

Term replace_constants(const Term& t, const std::vector<std::pair<std::string, Term>>& names) {
  if (t.is(TermKind::Const)) {
    for (const auto& [n, r] : names) {
      if (n == t.name()) return r;
    }
    return t;
  }
  if (t.arity() == 0) return t;
  std::vector<Term> kids;
  kids.reserve(t.arity());
  bool changed = false;
  for (const auto& c : t.children()) {
    kids.push_back(replace_constants(c, names));
    changed = changed || kids.back() != c;
  }
  return changed ? t.with_children(std::move(kids)) : t;
}

void collect_metas(const Term& t, std::vector<int>& out) {
  if (!t.has_meta()) return;
  if (t.is(TermKind::Meta)) {
    if (std::find(out.begin(), out.end(), t.meta_id()) == out.end()) out.push_back(t.meta_id());
    return;
  }
  for (const auto& c : t.children()) collect_metas(c, out);
}

namespace {

bool atomic(const Term& t) { return t.is(TermKind::Const) || t.is(TermKind::Meta); }

void print_into(std::string& out, const Term& t, const MetaNamer& meta_name);

void print_arg(std::string& out, const Term& t, const MetaNamer& meta_name) {
  if (atomic(t)) {
    print_into(out, t, meta_name);
  } else {
    out += '(';
    print_into(out, t, meta_name);
    out += ')';
  }
}

void print_into(std::string& out, const Term& t, const MetaNamer& meta_name) {
  switch (t.kind()) {
    case TermKind::Const: out += display_name(t.name()); break;
    case TermKind::Meta:
      out += meta_name ? meta_name(t.meta_id()) : "?m" + std::to_string(t.meta_id());
      break;
    case TermKind::Comp:
      print_into(out, t.child(0), meta_name);
      out += " . ";
      if (t.child(1).is(TermKind::Comp)) {
        out += '(';
        print_into(out, t.child(1), meta_name);
        out += ')';
      } else {
        print_into(out, t.child(1), meta_name);
      }
      break;
    case TermKind::Id:
      out += "id ";
      print_arg(out, t.child(0), meta_name);
      break;
    case TermKind::FObj:
    case TermKind::FMor:
    case TermKind::App:
      print_into(out, t.child(0), meta_name);
      out += ' ';
      print_arg(out, t.child(1), meta_name);
      break;
  }
}

} // namespace

std::string print(const Term& t, const MetaNamer& meta_name) {
  if (!t.valid()) return "<null>";
  std::string out;
  print_into(out, t, meta_name);
  return out;
}

} // namespace catdiag
