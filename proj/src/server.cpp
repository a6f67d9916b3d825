#include "catdiag/server.hpp"

#include "catdiag/error.hpp"
#include "catdiag/parser.hpp"

#include <condition_variable>
#include <deque>
#include <istream>
#include <memory>
#include <mutex>
#include <thread>

namespace catdiag {

using nlohmann::json;

std::string envelope_line(const json& envelope) {
  return envelope.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

constexpr std::size_t kMaxLine = 1 << 20;
constexpr int kMaxDepth = 64;

// Deep nesting would make the parsed value expensive to destroy.
bool too_deep(std::string_view line) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      if (++depth > kMaxDepth) return true;
    } else if (c == ']' || c == '}') {
      --depth;
    }
  }
  return false;
}

const json& param(const json& p, const char* key) {
  if (!p.is_object() || !p.contains(key)) throw Error(Errc::Protocol, std::string("missing parameter '") + key + "'");
  return p[key];
}

std::string str(const json& p, const char* key) {
  const json& v = param(p, key);
  if (!v.is_string()) throw Error(Errc::Protocol, std::string("parameter '") + key + "' must be a string");
  return v.get<std::string>();
}

double num(const json& p, const char* key) {
  const json& v = param(p, key);
  if (!v.is_number()) throw Error(Errc::Protocol, std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

std::optional<std::string> opt_str(const json& p, const char* key) {
  if (!p.is_object() || !p.contains(key) || p[key].is_null()) return std::nullopt;
  return str(p, key);
}

json names(const std::vector<std::string>& v) { return v; }

json positions_json(const Diagram& d, const LayoutPositions& pos) {
  json nodes = json::object();
  for (const auto& n : d.nodes()) {
    auto it = pos.pos.find(n.id);
    if (it == pos.pos.end()) continue;
    nodes[n.name] = {{"x", it->second.x}, {"y", it->second.y}, {"pinned", pos.pins.count(n.id) > 0}};
  }
  return {{"nodes", nodes}, {"seed", pos.seed}};
}

std::string lemma_text(const LemmaStatement& l) {
  std::string s;
  Quantifier q = Quantifier::Forall;
  bool open = false;
  for (const auto& b : l.binders) {
    if (!open || b.quantifier != q) {
      if (open) s += ", ";
      s += b.quantifier == Quantifier::Forall ? "forall" : "exists";
      q = b.quantifier;
      open = true;
    }
    s += " (" + display_name(b.name) + " : " + print(b.sort) + ")";
  }
  return s + (open ? ", " : "") + print(l.conclusion);
}

json match_json(const MatchSession& m, const Context& ctx) {
  json unifier = json::object();
  const auto& args = m.pattern().args;
  for (const auto& a : args) {
    Term v = m.subst().apply(a);
    std::string origin = ctx.meta(a.meta_id()).origin;
    unifier[origin.empty() ? print(a) : display_name(origin)] = v == a ? json(nullptr) : json(print(v));
  }
  json pairs = json::array();
  for (const auto& [p, t] : m.pairs()) pairs.push_back({p, t});
  return {{"lemma", m.pattern().lemma},
          {"pattern", to_json(m.pattern().diagram, ctx)},
          {"conclusion", m.pattern().conclusion},
          {"premises", m.pattern().premises},
          {"pairs", pairs},
          {"unifier", unifier}};
}

int node_id(const Diagram& d, const std::string& name) { return d.node_named(name).id; }

} // namespace

Session::Session(Sink sink) : sink_(std::move(sink)) {}

void Session::emit(const json& envelope) { sink_(envelope_line(envelope)); }

void Session::notify(const std::string& method, json params) {
  emit({{"kind", "notification"}, {"method", method}, {"params", std::move(params)}});
}

void Session::relayout() { layout_ = layout(proof_->diagram(), proof_->ctx(), &layout_); }

json Session::state() const {
  json s = state_json(*proof_);
  s["obligations"] = proof_->obligations();
  s["layout"] = positions_json(proof_->diagram(), layout_);
  s["lemma"] = proof_->lemma_session() ? match_json(*proof_->lemma_session(), proof_->ctx()) : json(nullptr);
  s["undo"] = undo_.size();
  s["redo"] = redo_.size();
  return s;
}

void Session::start(Context ctx, StartOptions opts) {
  opts_ = std::move(opts);
  json extra = json::object();
  if (opts_.script && !opts_.edit) {
    ReplayResult r = replay(*opts_.script, ctx, opts_.session);
    if (r.ok() && r.session.outcome() == Outcome::Succeeded) {
      proof_.emplace(std::move(r.session));
      closed_ = true;
      notify("replay/success", {{"replayed", true}, {"obligations", proof_->obligations()}});
      return;
    }
    if (r.error) {
      extra["replay_error"] = {{"step", r.error->step},
                               {"code", std::string(to_string(r.error->code))},
                               {"message", r.error->message}};
    }
    if (r.session.outcome() == Outcome::Running) {
      proof_.emplace(std::move(r.session));
    } else {
      proof_.emplace(std::move(ctx), opts_.session);
    }
  } else {
    proof_.emplace(std::move(ctx), opts_.session);
    if (opts_.script) {
      for (auto it = opts_.script->rbegin(); it != opts_.script->rend(); ++it) redo_.emplace_back(*it);
    }
  }
  relayout();
  json s = state();
  s.update(extra);
  notify("state/init", s);
}

std::uint64_t Session::receive(std::string_view line) {
  std::uint64_t seq = next_seq_.fetch_add(1);
  if (line.size() < kMaxLine && line.find("solve/cancel") != std::string_view::npos && !too_deep(line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("method") && j["method"] == "solve/cancel") {
      std::uint64_t prev = cancel_upto_.load();
      while (prev < seq && !cancel_upto_.compare_exchange_weak(prev, seq)) {
      }
      std::uint64_t run = running_.load();
      if (run != 0 && run < seq) cancel_.store(true);
    }
  }
  return seq;
}

void Session::handle(std::uint64_t seq, std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  if (line.find_first_not_of(" \t") == std::string_view::npos) return;
  auto malformed = [&](const std::string& why) {
    std::string excerpt(line.substr(0, 200));
    notify("protocol/malformed", {{"reason", why}, {"line", excerpt}});
  };
  if (line.size() >= kMaxLine) return malformed("line too long");
  if (too_deep(line)) return malformed("nesting too deep");
  json req = json::parse(line, nullptr, false);
  if (req.is_discarded()) return malformed("not valid JSON");
  if (!req.is_object()) return malformed("not an object");
  if (!req.contains("kind") || req["kind"] != "request") return malformed("kind must be \"request\"");
  if (!req.contains("id") || !req["id"].is_number_integer()) return malformed("id must be an integer");
  if (!req.contains("method") || !req["method"].is_string()) return malformed("method must be a string");

  json id = req["id"];
  std::string method = req["method"].get<std::string>();
  json params = req.contains("params") ? req["params"] : json::object();
  json resp = {{"id", id}, {"kind", "response"}, {"method", method}};
  try {
    resp["result"] = dispatch(seq, method, params);
  } catch (const Error& e) {
    resp["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  } catch (const json::exception& e) {
    resp["error"] = {{"code", std::string(to_string(Errc::Protocol))}, {"message", e.what()}};
  } catch (const std::exception& e) {
    resp["error"] = {{"code", "Internal"}, {"message", e.what()}};
  }
  emit(resp);
  if (changed_) {
    changed_ = false;
    notify("state/changed", state());
  }
}

template <class F>
json Session::mutate(F&& f) {
  ProofSession::Snapshot snap = proof_->snapshot();
  json r = f();
  undo_.push_back(std::move(snap));
  redo_.clear();
  relayout();
  changed_ = true;
  return r;
}

json Session::dispatch(std::uint64_t seq, const std::string& method, const json& params) {
  if (!proof_) {
    if (prestart_) return prestart_(*this, method, params);
    throw Error(Errc::Refused, "the session has not started");
  }
  if (closed_) throw Error(Errc::Refused, "the session is closed");
  ProofSession& p = *proof_;
  if (method == "state/get") return state();
  if (method == "solve/cancel") return json::object();
  if (method == "op/merge") {
    cmd::Merge c{str(params, "x"), str(params, "y")};
    return mutate([&] { return names(p.execute(c)); });
  }
  if (method == "op/split") {
    cmd::Split c{str(params, "edge")};
    return mutate([&] { return names(p.execute(c)); });
  }
  if (method == "op/compose") {
    cmd::Compose c;
    c.name = str(params, "name");
    if (auto anchor = opt_str(params, "anchor")) {
      c.anchor = *anchor;
    } else {
      const json& path = param(params, "path");
      if (!path.is_array()) throw Error(Errc::Protocol, "parameter 'path' must be an array of edge names");
      for (const auto& e : path) {
        if (!e.is_string()) throw Error(Errc::Protocol, "parameter 'path' must be an array of edge names");
        c.path.push_back(e.get<std::string>());
      }
    }
    return mutate([&] { return names(p.execute(c)); });
  }
  if (method == "op/insert") {
    std::string kind = str(params, "kind");
    cmd::Insert c{ObjectKind::Node, str(params, "text")};
    if (kind == "edge") {
      c.kind = ObjectKind::Edge;
    } else if (kind == "face") {
      c.kind = ObjectKind::Face;
    } else if (kind != "node") {
      throw Error(Errc::Protocol, "kind must be node, edge or face");
    }
    return mutate([&] { return names(p.execute(c)); });
  }
  if (method == "op/solve") {
    cmd::Solve c{str(params, "goal")};
    SessionOptions saved = p.options();
    SessionOptions o = saved;
    if (params.is_object() && params.contains("depth")) o.solve.depth = static_cast<int>(num(params, "depth"));
    o.solve.cancel = &cancel_;
    running_.store(seq);
    cancel_.store(cancel_upto_.load() > seq);
    p.set_options(o);
    struct Reset {
      Session& s;
      ProofSession& p;
      SessionOptions saved;
      ~Reset() {
        s.running_.store(0);
        p.set_options(saved);
      }
    } reset{*this, p, saved};
    return mutate([&] { return names(p.execute(c)); });
  }
  if (method == "op/decompose") {
    std::string goal = str(params, "goal");
    if (auto specs = opt_str(params, "specs")) {
      cmd::Decompose c{goal, parse_face_specs(*specs)};
      return mutate([&] { return names(p.execute(c)); });
    }
    return mutate([&] { return names(p.auto_decompose(goal, layout_)); });
  }
  if (method == "lemma/list") {
    json out = json::array();
    for (const auto& l : p.ctx().lemmas()) {
      std::string why = inadmissible_reason(l);
      out.push_back({{"name", l.name}, {"statement", lemma_text(l)}, {"admissible", why.empty()}, {"reason", why}});
    }
    return out;
  }
  if (method == "lemma/pattern") {
    Context scratch = p.ctx();
    Pattern pat = pattern_of(scratch, str(params, "lemma"));
    return {{"lemma", pat.lemma},
            {"pattern", to_json(pat.diagram, scratch)},
            {"conclusion", pat.conclusion},
            {"premises", pat.premises}};
  }
  if (method == "lemma/open") {
    p.open_lemma(str(params, "lemma"));
    return match_json(*p.lemma_session(), p.ctx());
  }
  if (method == "lemma/match") {
    p.match(str(params, "pattern"), str(params, "target"));
    return match_json(*p.lemma_session(), p.ctx());
  }
  if (method == "lemma/unmatch") {
    p.unmatch(str(params, "pattern"));
    return match_json(*p.lemma_session(), p.ctx());
  }
  if (method == "lemma/cancel") {
    p.cancel_lemma();
    return json::object();
  }
  if (method == "lemma/apply") {
    if (!p.lemma_session()) throw Error(Errc::NoMatchSession, "no lemma is open");
    return mutate([&] {
      ApplyResult r = p.apply_lemma();
      return json{{"conclusion", r.conclusion}, {"goals", r.new_goals}, {"closed_goal", r.closed_goal}};
    });
  }
  if (method == "layout/get") return positions_json(p.diagram(), layout_);
  if (method == "layout/drag") {
    int n = node_id(p.diagram(), str(params, "node"));
    layout_ = drag(p.diagram(), p.ctx(), layout_, n, {num(params, "x"), num(params, "y")});
    return positions_json(p.diagram(), layout_);
  }
  if (method == "layout/pin") {
    int n = node_id(p.diagram(), str(params, "node"));
    bool on = true;
    if (params.is_object() && params.contains("pinned")) {
      if (!params["pinned"].is_boolean()) throw Error(Errc::Protocol, "parameter 'pinned' must be a boolean");
      on = params["pinned"].get<bool>();
    }
    if (on) {
      pin(layout_, p.diagram(), n);
    } else {
      unpin(layout_, p.diagram(), n);
    }
    return positions_json(p.diagram(), layout_);
  }
  if (method == "edit/undo") {
    if (undo_.empty()) throw Error(Errc::Refused, "nothing to undo");
    redo_.emplace_back(p.snapshot());
    p.restore(undo_.back());
    undo_.pop_back();
    relayout();
    changed_ = true;
    return json::object();
  }
  if (method == "edit/redo") {
    if (redo_.empty()) throw Error(Errc::Refused, "nothing to redo");
    ProofSession::Snapshot now = p.snapshot();
    json r = json::object();
    if (auto* snap = std::get_if<ProofSession::Snapshot>(&redo_.back())) {
      p.restore(*snap);
    } else {
      r["goals"] = p.execute(std::get<Command>(redo_.back()));
      r["command"] = print_command(std::get<Command>(redo_.back()));
    }
    redo_.pop_back();
    undo_.push_back(std::move(now));
    relayout();
    changed_ = true;
    return r;
  }
  if (method == "proof/finish") {
    if (p.outcome() == Outcome::Failed) throw Error(Errc::Refused, "the proof was abandoned");
    if (p.outcome() == Outcome::Running) p.execute(cmd::Succeed{});
    bool saved = false;
    if (!opts_.save_path.empty()) {
      write_file_atomic(opts_.save_path, print_script(p.script()));
      saved = true;
    }
    closed_ = true;
    return {{"obligations", p.obligations()}, {"saved", saved}, {"script", print_script(p.script())}};
  }
  if (method == "proof/fail") {
    if (p.outcome() == Outcome::Running) p.execute(cmd::Fail{});
    closed_ = true;
    return json::object();
  }
  throw Error(Errc::Protocol, "unknown method '" + method + "'");
}

// ---------------------------------------------------------------- stdio

namespace {

struct LineQueue {
  std::mutex m;
  std::condition_variable cv;
  std::deque<std::pair<std::uint64_t, std::string>> q;
  bool done = false;

  void push(std::uint64_t seq, std::string line) {
    {
      std::lock_guard<std::mutex> lock(m);
      q.emplace_back(seq, std::move(line));
    }
    cv.notify_one();
  }

  void finish() {
    {
      std::lock_guard<std::mutex> lock(m);
      done = true;
    }
    cv.notify_one();
  }

  bool pop(std::pair<std::uint64_t, std::string>& out) {
    std::unique_lock<std::mutex> lock(m);
    cv.wait(lock, [&] { return done || !q.empty(); });
    if (q.empty()) return false;
    out = std::move(q.front());
    q.pop_front();
    return true;
  }
};

} // namespace

void serve_stream(Session& session, std::istream& in) {
  auto queue = std::make_shared<LineQueue>();
  auto reader_done = std::make_shared<std::atomic<bool>>(false);
  std::thread reader([&session, &in, queue, reader_done] {
    std::string line;
    while (std::getline(in, line)) {
      std::uint64_t seq = session.receive(line);
      queue->push(seq, std::move(line));
    }
    reader_done->store(true);
    queue->finish();
  });
  std::pair<std::uint64_t, std::string> item;
  while (!session.closed() && queue->pop(item)) session.handle(item.first, item.second);
  if (reader_done->load()) {
    reader.join();
  } else {
    reader.detach();
  }
}

} // namespace catdiag
