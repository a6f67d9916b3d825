#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catdiag {

enum class Errc {
  UndeclaredConstant,
  IllTypedComposition,
  IllTypedApplication,
  IllSorted,
  DuplicateName,
  Syntax,
  UnificationFailed,
  KindMismatch,
  UnknownObject,
  UnknownNode,
  UnknownEdge,
  UnknownFace,
  UnknownGoal,
  UnknownLemma,
  NotAGoal,
  IdentityEdge,
  BrokenPath,
  NonChainingSpecs,
  NonPlanarPositions,
  SolveFailed,
  Cancelled,
  NotAdmissible,
  NoMatchSession,
  Refused,
  Io,
  Protocol,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

/// Syntax error carrying a 1-based source position.
class SyntaxError : public Error {
public:
  SyntaxError(int line, int column, const std::string& message)
      : Error(Errc::Syntax, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

} // namespace catdiag
