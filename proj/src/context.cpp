#include "catdiag/context.hpp"

#include "catdiag/error.hpp"

#include <algorithm>

namespace catdiag {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::UndeclaredConstant: return "UndeclaredConstant";
    case Errc::IllTypedComposition: return "IllTypedComposition";
    case Errc::IllTypedApplication: return "IllTypedApplication";
    case Errc::IllSorted: return "IllSorted";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::Syntax: return "SyntaxError";
    case Errc::UnificationFailed: return "UnificationFailed";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::UnknownObject: return "UnknownObject";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::UnknownFace: return "UnknownFace";
    case Errc::UnknownGoal: return "UnknownGoal";
    case Errc::UnknownLemma: return "UnknownLemma";
    case Errc::NotAGoal: return "NotAGoal";
    case Errc::IdentityEdge: return "IdentityEdge";
    case Errc::BrokenPath: return "BrokenPath";
    case Errc::NonChainingSpecs: return "NonChainingSpecs";
    case Errc::NonPlanarPositions: return "NonPlanarPositions";
    case Errc::SolveFailed: return "SolveFailed";
    case Errc::Cancelled: return "Cancelled";
    case Errc::NotAdmissible: return "NotAdmissible";
    case Errc::NoMatchSession: return "NoMatchSession";
    case Errc::Refused: return "Refused";
    case Errc::Io: return "IoError";
    case Errc::Protocol: return "ProtocolError";
  }
  return "Unknown";
}

std::string print(const Sort& s, const MetaNamer& meta_name) {
  auto p = [&](const Term& t) { return print(t, meta_name); };
  switch (s.kind) {
    case SortKind::Cat: return "cat";
    case SortKind::Prop: return "prop";
    case SortKind::Obj: return p(s.category());
    case SortKind::Mor: return p(s.src()) + " -> " + p(s.dst()) + " in " + p(s.category());
    case SortKind::Funct: return p(s.terms[0]) + " => " + p(s.terms[1]);
    case SortKind::Eq: return p(s.lhs()) + " = " + p(s.rhs());
    case SortKind::Map: return "(" + print(s.sorts[0], meta_name) + ") => (" + print(s.sorts[1], meta_name) + ")";
  }
  return "?";
}

std::size_t LemmaStatement::forall_count() const {
  return static_cast<std::size_t>(std::count_if(binders.begin(), binders.end(), [](const Binder& b) {
    return b.quantifier == Quantifier::Forall;
  }));
}

void Context::declare(std::string name, DeclKind kind, Sort sort) {
  if (declared(name)) throw Error(Errc::DuplicateName, "duplicate declaration '" + name + "'");
  index_[name] = decls_.size();
  decls_.push_back({std::move(name), kind, std::move(sort)});
}

bool Context::declared(const std::string& name) const {
  return index_.count(name) != 0 || lemma(name) != nullptr || goal(name) != nullptr;
}

const Declaration* Context::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &decls_[it->second];
}

std::size_t Context::count(DeclKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(decls_.begin(), decls_.end(), [kind](const Declaration& d) { return d.kind == kind; }));
}

void Context::add_lemma(LemmaStatement lemma) {
  if (declared(lemma.name)) throw Error(Errc::DuplicateName, "duplicate declaration '" + lemma.name + "'");
  lemmas_.push_back(std::move(lemma));
}

const LemmaStatement* Context::lemma(const std::string& name) const {
  for (const auto& l : lemmas_) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

int Context::add_goal(std::string name, const Sort& statement) {
  if (declared(name)) throw Error(Errc::DuplicateName, "duplicate declaration '" + name + "'");
  int m = fresh_meta(statement, name);
  goals_.push_back({std::move(name), m});
  return m;
}

const GoalDecl* Context::goal(const std::string& name) const {
  for (const auto& g : goals_) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const GoalDecl* Context::goal_of_meta(int meta) const {
  for (const auto& g : goals_) {
    if (g.meta == meta) return &g;
  }
  return nullptr;
}

int Context::fresh_meta(Sort sort, std::string origin) {
  metas_.push_back({std::move(sort), std::move(origin)});
  return static_cast<int>(metas_.size()) - 1;
}

void Context::assign_trace(int goal_meta, TraceRef trace) { traces_[goal_meta] = std::move(trace); }

TraceRef Context::proof_of(int goal_meta) const {
  if (auto it = traces_.find(goal_meta); it != traces_.end()) return it->second;
  if (auto bound = subst_.lookup(goal_meta)) return trace_of_proof_term(*bound, *this);
  return nullptr;
}

bool Context::is_open(int goal_meta) const {
  return traces_.count(goal_meta) == 0 && !subst_.bound(goal_meta);
}

std::string skolem_name(const std::string& lemma, std::size_t k) {
  return "pi" + std::to_string(k) + "_" + lemma;
}

Instantiated instantiate(const LemmaStatement& lemma, const std::vector<Term>& args) {
  std::vector<std::pair<std::string, Term>> names;
  Instantiated out;
  std::size_t next_arg = 0;
  std::size_t next_exists = 0;
  for (const auto& b : lemma.binders) {
    Sort s = map_terms(b.sort, [&](const Term& t) { return replace_constants(t, names); });
    if (b.quantifier == Quantifier::Forall) {
      out.binder_sorts.push_back(s);
      if (next_arg < args.size()) names.emplace_back(b.name, args[next_arg]);
      ++next_arg;
    } else {
      names.emplace_back(b.name, Term::constant(skolem_name(lemma.name, next_exists++)));
    }
  }
  out.conclusion = map_terms(lemma.conclusion, [&](const Term& t) { return replace_constants(t, names); });
  return out;
}

} // namespace catdiag
