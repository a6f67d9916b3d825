#include "catdiag/script.hpp"

#include "catdiag/error.hpp"
#include "catdiag/parser.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace catdiag {

bool is_terminal(const Command& c) {
  return std::holds_alternative<cmd::Succeed>(c) || std::holds_alternative<cmd::Fail>(c);
}

// ---------------------------------------------------------------- parsing

namespace {

class LineParser {
public:
  LineParser(std::string_view text, int line) : text_(text), line_(line) {}

  bool at_end() {
    skip();
    return i_ == text_.size();
  }

  std::string word() {
    skip();
    std::size_t j = i_;
    while (j < text_.size() && text_[j] != ' ' && text_[j] != '\t') ++j;
    if (j == i_) throw error("unexpected end of line");
    std::string w(text_.substr(i_, j - i_));
    i_ = j;
    return w;
  }

  std::string name(const char* what) {
    skip();
    std::size_t at = i_;
    std::string w = word();
    if (!is_identifier(w)) throw error_at(at, std::string("expected ") + what + ", got '" + w + "'");
    return w;
  }

  std::string rest() {
    skip();
    std::string r(text_.substr(i_));
    while (!r.empty() && (r.back() == ' ' || r.back() == '\t')) r.pop_back();
    i_ = text_.size();
    return r;
  }

  void end() {
    if (!at_end()) throw error("unexpected '" + std::string(text_.substr(i_)) + "'");
  }

  std::size_t pos() {
    skip();
    return i_;
  }

  SyntaxError error(const std::string& msg) const { return error_at(i_, msg); }
  SyntaxError error_at(std::size_t at, const std::string& msg) const {
    return SyntaxError(line_, static_cast<int>(at) + 1, msg);
  }

private:
  void skip() {
    while (i_ < text_.size() && (text_[i_] == ' ' || text_[i_] == '\t' || text_[i_] == '\r')) ++i_;
  }

  std::string_view text_;
  int line_;
  std::size_t i_ = 0;
};

std::vector<std::string> split_names(LineParser& p, std::size_t at, const std::string& list) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!is_identifier(cur)) throw p.error_at(at, "expected edge names separated by ','");
    out.push_back(cur);
    cur.clear();
  };
  for (char c : list) {
    if (c == ' ' || c == '\t') continue;
    if (c == ',') {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

Command parse_line(std::string_view text, int line) {
  LineParser p(text, line);
  std::size_t at = p.pos();
  std::string head = p.word();
  if (head == "merge") {
    cmd::Merge m{p.name("a name"), p.name("a name")};
    p.end();
    return m;
  }
  if (head == "split") {
    cmd::Split s{p.name("an edge name")};
    p.end();
    return s;
  }
  if (head == "solve") {
    cmd::Solve s{p.name("a goal name")};
    p.end();
    return s;
  }
  if (head == "decompose") {
    cmd::Decompose d;
    d.goal = p.name("a goal name");
    std::size_t spec_at = p.pos();
    try {
      d.specs = parse_face_specs(p.rest());
    } catch (const SyntaxError& e) {
      std::string msg = e.what();
      msg = msg.substr(msg.find(": ") + 2); // drop the inner position
      throw p.error_at(spec_at + static_cast<std::size_t>(e.column()) - 1, msg);
    }
    return d;
  }
  if (head == "apply") {
    cmd::Apply a;
    a.lemma = p.name("a lemma name");
    while (!p.at_end()) {
      std::size_t pair_at = p.pos();
      std::string w = p.word();
      auto colon = w.find(':');
      if (colon == std::string::npos || !is_identifier(w.substr(0, colon)) || !is_identifier(w.substr(colon + 1))) {
        throw p.error_at(pair_at, "expected pattern:target, got '" + w + "'");
      }
      a.pairs.emplace_back(w.substr(0, colon), w.substr(colon + 1));
    }
    return a;
  }
  if (head == "compose") {
    cmd::Compose c;
    c.name = p.name("an edge name");
    std::size_t path_at = p.pos();
    std::string path = p.rest();
    if (path.empty()) throw p.error("expected a path or @node");
    if (path.front() == '@') {
      c.anchor = path.substr(1);
      if (!is_identifier(c.anchor)) throw p.error_at(path_at, "expected a node name after '@'");
    } else {
      c.path = split_names(p, path_at, path);
    }
    return c;
  }
  if (head == "insert") {
    std::size_t kind_at = p.pos();
    std::string kind = p.word();
    cmd::Insert ins;
    if (kind == "node") {
      ins.kind = ObjectKind::Node;
    } else if (kind == "edge") {
      ins.kind = ObjectKind::Edge;
    } else if (kind == "face") {
      ins.kind = ObjectKind::Face;
    } else {
      throw p.error_at(kind_at, "expected node, edge or face");
    }
    ins.text = p.rest();
    if (ins.text.empty()) throw p.error("expected a term");
    return ins;
  }
  if (head == "succeed") {
    p.end();
    return cmd::Succeed{};
  }
  if (head == "fail") {
    p.end();
    return cmd::Fail{};
  }
  throw p.error_at(at, "unknown command '" + head + "'");
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r") == std::string_view::npos; }

} // namespace

Command parse_command(std::string_view line) {
  line = strip_comment(line);
  if (blank(line)) throw SyntaxError(1, 1, "empty command");
  return parse_line(line, 1);
}

Script parse_script(std::string_view text) {
  Script out;
  int line = 0;
  int terminal_line = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line;
    std::string_view l = strip_comment(raw);
    if (!blank(l)) {
      if (terminal_line) {
        throw SyntaxError(line, 1, "command after the terminal command on line " + std::to_string(terminal_line));
      }
      out.push_back(parse_line(l, line));
      if (is_terminal(out.back())) terminal_line = line;
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

std::string print_command(const Command& c) {
  struct Printer {
    std::string operator()(const cmd::Merge& m) const { return "merge " + m.x + " " + m.y; }
    std::string operator()(const cmd::Split& s) const { return "split " + s.edge; }
    std::string operator()(const cmd::Decompose& d) const {
      std::string specs = print_face_specs(d.specs);
      return "decompose " + d.goal + (specs.empty() ? "" : " " + specs);
    }
    std::string operator()(const cmd::Apply& a) const {
      std::string s = "apply " + a.lemma;
      for (const auto& [p, t] : a.pairs) s += " " + p + ":" + t;
      return s;
    }
    std::string operator()(const cmd::Solve& s) const { return "solve " + s.goal; }
    std::string operator()(const cmd::Compose& c) const {
      if (c.path.empty()) return "compose " + c.name + " @" + c.anchor;
      std::string s = "compose " + c.name + " ";
      for (std::size_t i = 0; i < c.path.size(); ++i) s += (i ? "," : "") + c.path[i];
      return s;
    }
    std::string operator()(const cmd::Insert& i) const { return "insert " + std::string(to_string(i.kind)) + " " + i.text; }
    std::string operator()(const cmd::Succeed&) const { return "succeed"; }
    std::string operator()(const cmd::Fail&) const { return "fail"; }
  };
  return std::visit(Printer{}, c);
}

std::string print_script(const Script& s) {
  std::string out;
  for (const auto& c : s) out += print_command(c) + "\n";
  return out;
}

// ---------------------------------------------------------------- sessions

ProofSession::ProofSession(Context ctx, SessionOptions opts) : ctx_(std::move(ctx)), opts_(std::move(opts)) {
  diagram_ = extract_diagram(ctx_);
}

void ProofSession::require_running() const {
  if (outcome_ != Outcome::Running) throw Error(Errc::Refused, "the proof is already finished");
}

ProofSession::Snapshot ProofSession::snapshot() const {
  return {before_lemma_ ? *before_lemma_ : ctx_, diagram_, script_, outcome_};
}

void ProofSession::restore(const Snapshot& s) {
  match_.reset();
  before_lemma_.reset();
  ctx_ = s.ctx;
  diagram_ = s.diagram;
  script_ = s.script;
  outcome_ = s.outcome;
}

std::vector<std::string> ProofSession::execute(const Command& c) {
  require_running();
  cancel_lemma();
  Context ctx = ctx_;
  Diagram d = diagram_;
  try {
    auto out = run(c);
    script_.push_back(c);
    return out;
  } catch (...) {
    ctx_ = std::move(ctx);
    diagram_ = std::move(d);
    throw;
  }
}

std::vector<std::string> ProofSession::run(const Command& c) {
  std::vector<std::string> created;
  auto new_goal_faces = [&](std::size_t before) {
    for (std::size_t i = before; i < diagram_.faces().size(); ++i) {
      if (diagram_.faces()[i].kind == FaceKind::Goal) created.push_back(diagram_.faces()[i].name);
    }
  };
  std::size_t faces = diagram_.faces().size();
  if (const auto* m = std::get_if<cmd::Merge>(&c)) {
    merge(diagram_, ctx_, m->x, m->y);
  } else if (const auto* s = std::get_if<cmd::Split>(&c)) {
    split_edge(diagram_, ctx_, s->edge);
  } else if (const auto* dc = std::get_if<cmd::Decompose>(&c)) {
    created = decompose(diagram_, ctx_, dc->goal, dc->specs);
  } else if (const auto* a = std::get_if<cmd::Apply>(&c)) {
    MatchSession ms(ctx_, a->lemma);
    for (const auto& [p, t] : a->pairs) ms.match(diagram_, p, t);
    created = ms.apply(diagram_).new_goals;
  } else if (const auto* sv = std::get_if<cmd::Solve>(&c)) {
    auto hit = diagram_.lookup(sv->goal);
    const Face* f = hit && hit->first == ObjectKind::Face ? diagram_.face(hit->second) : nullptr;
    // Goals closed at extraction (both sides equal) accept a solve as a no-op.
    if (!(f && f->kind == FaceKind::Goal && face_proved(*f, ctx_))) solve_goal(diagram_, ctx_, sv->goal, opts_.solve);
  } else if (const auto* cp = std::get_if<cmd::Compose>(&c)) {
    compose_path(diagram_, ctx_, cp->name, cp->path, cp->anchor);
  } else if (const auto* ins = std::get_if<cmd::Insert>(&c)) {
    switch (ins->kind) {
      case ObjectKind::Node: insert_node(diagram_, ctx_, ins->text); break;
      case ObjectKind::Edge: insert_edge(diagram_, ctx_, ins->text); break;
      case ObjectKind::Face:
        insert_face(diagram_, ctx_, ins->text);
        new_goal_faces(faces);
        break;
    }
  } else if (std::holds_alternative<cmd::Succeed>(c)) {
    outcome_ = Outcome::Succeeded;
  } else {
    outcome_ = Outcome::Failed;
  }
  return created;
}

const MatchSession& ProofSession::open_lemma(const std::string& lemma) {
  require_running();
  cancel_lemma();
  Context before = ctx_;
  try {
    match_ = std::make_unique<MatchSession>(ctx_, lemma);
  } catch (...) {
    ctx_ = std::move(before);
    throw;
  }
  before_lemma_ = std::move(before);
  return *match_;
}

void ProofSession::cancel_lemma() {
  match_.reset();
  if (before_lemma_) {
    ctx_ = std::move(*before_lemma_);
    before_lemma_.reset();
  }
}

void ProofSession::match(const std::string& pattern_obj, const std::string& target_obj) {
  if (!match_) throw Error(Errc::NoMatchSession, "no lemma is open");
  match_->match(diagram_, pattern_obj, target_obj);
}

void ProofSession::unmatch(const std::string& pattern_obj) {
  if (!match_) throw Error(Errc::NoMatchSession, "no lemma is open");
  match_->unmatch(diagram_, pattern_obj);
}

ApplyResult ProofSession::apply_lemma() {
  if (!match_) throw Error(Errc::NoMatchSession, "no lemma is open");
  cmd::Apply a{match_->pattern().lemma, match_->pairs()};
  Context ctx = ctx_;
  Diagram d = diagram_;
  ApplyResult r;
  try {
    r = match_->apply(diagram_);
  } catch (...) {
    ctx_ = std::move(ctx);
    diagram_ = std::move(d);
    throw;
  }
  match_.reset();
  before_lemma_.reset();
  script_.push_back(std::move(a));
  return r;
}

std::vector<std::string> ProofSession::auto_decompose(const std::string& goal, const LayoutPositions& pos) {
  return execute(cmd::Decompose{goal, planar_specs(diagram_, ctx_, goal, pos)});
}

std::vector<std::string> ProofSession::obligations() const {
  std::vector<std::string> out;
  const Context& c = before_lemma_ ? *before_lemma_ : ctx_;
  for (const auto& g : c.goals()) {
    if (c.is_open(g.meta)) out.push_back(g.name);
  }
  return out;
}

ReplayResult replay(const Script& script, Context ctx, SessionOptions opts) {
  ReplayResult r{ProofSession(std::move(ctx), std::move(opts)), std::nullopt};
  for (std::size_t i = 0; i < script.size(); ++i) {
    try {
      r.session.execute(script[i]);
    } catch (const Error& e) {
      r.error = ReplayError{i, e.code(), e.what()};
      break;
    }
  }
  return r;
}

std::vector<GoalReport> verify_goals(const Context& ctx) {
  std::vector<GoalReport> out;
  for (const auto& g : ctx.goals()) {
    bool proved = !ctx.is_open(g.meta);
    out.push_back({g.name, proved, proved ? check_goal(g.meta, ctx, true) : CheckResult{false, "open"}});
  }
  return out;
}

nlohmann::json state_json(const ProofSession& s) {
  nlohmann::json goals = nlohmann::json::array();
  for (const auto& g : s.ctx().goals()) {
    goals.push_back({{"name", g.name},
                     {"proved", !s.ctx().is_open(g.meta)},
                     {"statement", print(s.ctx().resolve(s.ctx().meta(g.meta).sort))}});
  }
  const char* outcome = s.outcome() == Outcome::Succeeded ? "succeeded" : s.outcome() == Outcome::Failed ? "failed" : "running";
  return {{"diagram", to_json(s.diagram(), s.ctx())},
          {"goals", goals},
          {"outcome", outcome},
          {"script", print_script(s.script())}};
}

void write_file_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write '" + tmp + "'");
    out << text;
    out.flush();
    if (!out) throw Error(Errc::Io, "cannot write '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::Io, "cannot replace '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace catdiag
