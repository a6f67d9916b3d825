#pragma once

#include "catdiag/layout.hpp"
#include "catdiag/script.hpp"

#include "json.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace catdiag {

/// Serializes an envelope to one line (no trailing newline). Invalid UTF-8
/// is replaced, never thrown.
std::string envelope_line(const nlohmann::json& envelope);

struct StartOptions {
  SessionOptions session;
  std::optional<Script> script; // recorded proof, if any
  bool edit = false;            // load the script into the redo queue instead of replaying it
  std::string save_path;        // written on proof/finish; empty means never
};

/// One protocol session: request lines in, envelope lines out.
///
/// Requests are handled strictly in order. `receive` may run on another
/// thread than `handle` so that `solve/cancel` can interrupt a running solve.
class Session {
public:
  using Sink = std::function<void(const std::string& line)>;

  explicit Session(Sink sink);

  /// Extracts the diagram, then replays or queues the script. Emits either
  /// `replay/success` (and closes) or `state/init`.
  void start(Context ctx, StartOptions opts = {});

  /// Stamps a line with its arrival number; notes cancellation requests.
  std::uint64_t receive(std::string_view line);
  void handle(std::uint64_t seq, std::string_view line);
  void handle_line(std::string_view line) { handle(receive(line), line); }

  bool started() const { return proof_.has_value(); }
  bool closed() const { return closed_; }
  const ProofSession& proof() const { return *proof_; }
  const LayoutPositions& positions() const { return layout_; }

  /// Full state as sent in `state/init` and `state/get`.
  nlohmann::json state() const;

  /// Requests served before `start` (the websocket opening request).
  using PreStart = std::function<nlohmann::json(Session&, const std::string& method, const nlohmann::json& params)>;
  void set_prestart(PreStart f) { prestart_ = std::move(f); }

private:
  nlohmann::json dispatch(std::uint64_t seq, const std::string& method, const nlohmann::json& params);
  void emit(const nlohmann::json& envelope);
  void notify(const std::string& method, nlohmann::json params);
  void relayout();

  // Runs a mutation with an undo snapshot; returns its result.
  template <class F>
  nlohmann::json mutate(F&& f);

  using Redo = std::variant<ProofSession::Snapshot, Command>;

  Sink sink_;
  std::optional<ProofSession> proof_;
  StartOptions opts_;
  LayoutPositions layout_;
  std::vector<ProofSession::Snapshot> undo_;
  std::vector<Redo> redo_;
  bool closed_ = false;
  bool changed_ = false; // state/changed goes out after the response
  PreStart prestart_;

  std::atomic<std::uint64_t> next_seq_{1};
  std::atomic<std::uint64_t> cancel_upto_{0};
  std::atomic<std::uint64_t> running_{0};
  std::atomic<bool> cancel_{false};
};

/// Feeds request lines from `in` to a started session until EOF or until the
/// session closes. A reader thread feeds the calling thread so that
/// `solve/cancel` takes effect during a solve. When the session closes
/// before EOF the reader is detached, so `in` and `session` must outlive the
/// process (stdin and a session in main).
void serve_stream(Session& session, std::istream& in);

/// Websocket endpoint: one Session per connection. The first request on a
/// connection must be `session/open {exercise}`, which loads
/// `<exercises>/<exercise>.ctx`. Blocks; returns only on error or when
/// `stop` becomes true. `on_listen` receives the bound port.
void serve_websocket(unsigned short port, const std::string& exercises, const SessionOptions& opts,
                     const std::atomic<bool>* stop = nullptr, std::function<void(unsigned short)> on_listen = {});

} // namespace catdiag
