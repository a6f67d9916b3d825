#pragma once

#include "catdiag/diagram.hpp"
#include "catdiag/error.hpp"
#include "catdiag/lemmas.hpp"
#include "catdiag/solver.hpp"

#include "json.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace catdiag {

namespace cmd {

struct Merge {
  std::string x, y;
  friend bool operator==(const Merge&, const Merge&) = default;
};
struct Split {
  std::string edge;
  friend bool operator==(const Split&, const Split&) = default;
};
struct Decompose {
  std::string goal;
  std::vector<FaceSpec> specs;
  friend bool operator==(const Decompose&, const Decompose&) = default;
};
struct Apply {
  std::string lemma;
  std::vector<std::pair<std::string, std::string>> pairs; // pattern object, diagram object
  friend bool operator==(const Apply&, const Apply&) = default;
};
struct Solve {
  std::string goal;
  friend bool operator==(const Solve&, const Solve&) = default;
};
/// `compose NAME e1,e2` or, for an identity, `compose NAME @node`.
struct Compose {
  std::string name;
  std::vector<std::string> path;
  std::string anchor;
  friend bool operator==(const Compose&, const Compose&) = default;
};
struct Insert {
  ObjectKind kind;
  std::string text;
  friend bool operator==(const Insert&, const Insert&) = default;
};
struct Succeed {
  friend bool operator==(const Succeed&, const Succeed&) = default;
};
struct Fail {
  friend bool operator==(const Fail&, const Fail&) = default;
};

} // namespace cmd

using Command = std::variant<cmd::Merge, cmd::Split, cmd::Decompose, cmd::Apply, cmd::Solve, cmd::Compose,
                             cmd::Insert, cmd::Succeed, cmd::Fail>;
using Script = std::vector<Command>;

bool is_terminal(const Command& c);

/// One command per line; blank lines and `#` comments are skipped. Throws
/// SyntaxError with the line and column.
Script parse_script(std::string_view text);
Command parse_command(std::string_view line);
std::string print_command(const Command& c);
/// Every command on its own line, newline-terminated.
std::string print_script(const Script& s);

// -- sessions -----------------------------------------------------------------

struct SessionOptions {
  SolveOptions solve;
};

enum class Outcome : std::uint8_t { Running, Succeeded, Failed };

/// Proof state plus the recorder. Every proof-relevant change goes through
/// `execute` (or the lemma calls, which record one Apply on success).
class ProofSession {
public:
  explicit ProofSession(Context ctx, SessionOptions opts = {});

  const Context& ctx() const { return ctx_; }
  const Diagram& diagram() const { return diagram_; }
  const Script& script() const { return script_; }
  Outcome outcome() const { return outcome_; }
  const SessionOptions& options() const { return opts_; }
  void set_options(SessionOptions o) { opts_ = std::move(o); }

  /// Runs and records a command. On error nothing changes. Returns the
  /// goals the command created.
  std::vector<std::string> execute(const Command& c);

  // Interactive lemma application.
  const MatchSession& open_lemma(const std::string& lemma);
  void match(const std::string& pattern_obj, const std::string& target_obj);
  void unmatch(const std::string& pattern_obj);
  ApplyResult apply_lemma();
  void cancel_lemma();
  const MatchSession* lemma_session() const { return match_.get(); }

  /// Decompose with specs computed from `pos`; records the explicit specs.
  std::vector<std::string> auto_decompose(const std::string& goal, const LayoutPositions& pos);

  /// Names of goals not yet proved, in declaration order.
  std::vector<std::string> obligations() const;

  /// State without the match session, for undo snapshots.
  struct Snapshot {
    Context ctx;
    Diagram diagram;
    Script script;
    Outcome outcome;
  };
  Snapshot snapshot() const;
  void restore(const Snapshot& s);

private:
  std::vector<std::string> run(const Command& c);
  void require_running() const;

  Context ctx_;
  Diagram diagram_;
  Script script_;
  Outcome outcome_ = Outcome::Running;
  SessionOptions opts_;
  std::unique_ptr<MatchSession> match_;
  std::optional<Context> before_lemma_; // pattern metas are dropped on cancel
};

struct ReplayError {
  std::size_t step;
  Errc code;
  std::string message;
};

struct ReplayResult {
  ProofSession session;
  std::optional<ReplayError> error;

  bool ok() const { return !error; }
};

/// Runs `script` from a fresh extraction of `ctx`. Stops at the first failing
/// command, keeping the state reached so far.
ReplayResult replay(const Script& script, Context ctx, SessionOptions opts = {});

struct GoalReport {
  std::string name;
  bool proved;
  CheckResult check; // for proved goals; open holes count as assumptions
};

/// One report per goal in declaration order.
std::vector<GoalReport> verify_goals(const Context& ctx);

/// Serialized final state: diagram, goals with status, script text.
nlohmann::json state_json(const ProofSession& s);

/// Writes through a temporary file and a rename. Throws Error{Io}.
void write_file_atomic(const std::string& path, const std::string& text);
/// Throws Error{Io} when the file cannot be read.
std::string read_file(const std::string& path);

} // namespace catdiag
