#pragma once

#include "catdiag/context.hpp"
#include "catdiag/sort.hpp"
#include "catdiag/term.hpp"

#include <string_view>
#include <variant>

namespace catdiag {

/// Parses a context file into a fresh Context.
///
///   category C
///   object a b : C
///   morphism m1 m2 : a -> b in C
///   functor F : C => D
///   map f : (a -> b) => (a -> c) in C
///   hypothesis H : m1 = m2 . I
///   lemma L : forall (x y : C) (m : x -> y), exists (e : x -> x), e . m = m
///   goal G : m1 = m2
///
/// `.` is diagrammatic composition, `I` an identity whose object is inferred
/// from its neighbours, `id a` an explicit identity. Juxtaposition applies
/// functors and maps (right-associative) or instantiates a lemma.
Context parse_context(std::string_view text);

/// Adds the declarations of `text` to an existing context.
void parse_into(Context& ctx, std::string_view text);

/// Lemma library: `lemma` lines only (plus comments and blank lines).
void parse_lemma_library(Context& ctx, std::string_view text);

/// A single term over `ctx`; metas are written `?m<id>`.
Term parse_term(std::string_view text, const Context& ctx);

/// `lhs = rhs` over `ctx`, as an equality sort.
Sort parse_equation(std::string_view text, const Context& ctx);

/// Either an equation or a term (used by face insertion).
std::variant<Term, Sort> parse_term_or_equation(std::string_view text, const Context& ctx);

/// Adds a lemma and declares the projection constants of its existentials.
void register_lemma(Context& ctx, LemmaStatement lemma);

/// `[A-Za-z_][A-Za-z0-9_']*`, with `-` allowed between alphanumerics.
bool is_identifier(std::string_view s);

} // namespace catdiag
