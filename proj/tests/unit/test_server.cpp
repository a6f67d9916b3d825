#include "doctest.h"
#include "support.hpp"

#include "catdiag/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

using namespace catdiag;
using namespace catdiag::test;
using nlohmann::json;

namespace {

struct Capture {
  std::mutex m;
  std::vector<json> out;

  Session::Sink sink() {
    return [this](const std::string& line) {
      CHECK(line.find('\n') == std::string::npos);
      std::lock_guard<std::mutex> lock(m);
      out.push_back(json::parse(line));
    };
  }

  std::vector<json> take() {
    std::lock_guard<std::mutex> lock(m);
    return std::exchange(out, {});
  }
};

json request(int id, const std::string& method, json params = json::object()) {
  return {{"id", id}, {"kind", "request"}, {"method", method}, {"params", std::move(params)}};
}

std::string line(int id, const std::string& method, json params = json::object()) {
  return request(id, method, std::move(params)).dump();
}

const json* response(const std::vector<json>& out, int id) {
  for (const auto& e : out) {
    if (e["kind"] == "response" && e["id"] == id) return &e;
  }
  return nullptr;
}

std::vector<std::string> notifications(const std::vector<json>& out) {
  std::vector<std::string> v;
  for (const auto& e : out) {
    if (e["kind"] == "notification") v.push_back(e["method"]);
  }
  return v;
}

Context demo() { return corpus_context("demo.ctx"); }

Script demo_script() { return parse_script(slurp(corpus_path("demo.diag"))); }

} // namespace

TEST_CASE("a finished recording replays and closes") {
  Capture c;
  Session s(c.sink());
  StartOptions o;
  o.script = demo_script();
  s.start(demo(), o);
  auto out = c.take();
  REQUIRE(out.size() == 1);
  CHECK(out[0]["method"] == "replay/success");
  CHECK(s.closed());
  s.handle_line(line(1, "state/get"));
  out = c.take();
  REQUIRE(out.size() == 1);
  CHECK(out[0]["error"]["code"] == "Refused");
}

TEST_CASE("a broken recording opens the editor at the failure") {
  Capture c;
  Session s(c.sink());
  StartOptions o;
  o.script = parse_script("merge m3 m3_0\nsplit nowhere\nsucceed\n");
  s.start(demo(), o);
  auto out = c.take();
  REQUIRE(out.size() == 1);
  CHECK(out[0]["method"] == "state/init");
  CHECK(out[0]["params"]["replay_error"]["step"] == 1);
  CHECK(out[0]["params"]["replay_error"]["code"] == "UnknownEdge");
  CHECK(out[0]["params"]["script"] == "merge m3 m3_0\n");
  CHECK_FALSE(s.closed());
}

TEST_CASE("a failed recording starts over") {
  Capture c;
  Session s(c.sink());
  StartOptions o;
  o.script = parse_script("merge m3 m3_0\nfail\n");
  s.start(demo(), o);
  auto out = c.take();
  REQUIRE(out.size() == 1);
  CHECK(out[0]["method"] == "state/init");
  CHECK(out[0]["params"]["script"] == "");
  CHECK(out[0]["params"]["outcome"] == "running");
}

TEST_CASE("envelopes and errors") {
  Capture c;
  Session s(c.sink());
  s.handle_line(line(1, "state/get"));
  auto out = c.take();
  REQUIRE(out.size() == 1);
  CHECK(out[0]["error"]["code"] == "Refused");

  s.start(demo());
  c.take();
  s.handle_line(line(2, "no/such"));
  s.handle_line(line(3, "op/merge", {{"x", 1}}));
  s.handle_line(line(4, "op/merge", {{"x", "a"}, {"y", "b"}}));
  s.handle_line(line(5, "op/split", json::array()));
  s.handle_line("{not json");
  s.handle_line("[1,2]");
  s.handle_line(R"({"id":6,"kind":"response","method":"state/get"})");
  s.handle_line(R"({"id":"7","kind":"request","method":"state/get"})");
  s.handle_line(std::string(100, '[') + std::string(100, ']'));
  s.handle_line("   ");
  s.handle_line("\xff\xfe");
  out = c.take();
  CHECK((*response(out, 2))["error"]["code"] == "ProtocolError");
  CHECK((*response(out, 3))["error"]["code"] == "ProtocolError");
  CHECK((*response(out, 4))["error"]["code"] == "UnificationFailed");
  CHECK((*response(out, 5))["error"]["code"] == "ProtocolError");
  CHECK(notifications(out) == std::vector<std::string>(6, "protocol/malformed"));
  for (const auto& e : out) {
    if (e["kind"] == "response") CHECK(e["method"].is_string());
  }
}

TEST_CASE("mutations notify after responding; undo and redo restore state") {
  Capture c;
  Session s(c.sink());
  s.start(demo());
  c.take();
  json initial = s.state();

  s.handle_line(line(1, "op/merge", {{"x", "m3"}, {"y", "m3_0"}}));
  auto out = c.take();
  REQUIRE(out.size() == 2);
  CHECK(out[0]["kind"] == "response");
  CHECK(out[1]["method"] == "state/changed");
  json merged = s.state();

  s.handle_line(line(2, "edit/undo"));
  json undone = s.state();
  CHECK(undone["diagram"] == initial["diagram"]);
  CHECK(undone["script"] == initial["script"]);
  CHECK(undone["redo"] == 1);

  s.handle_line(line(3, "edit/redo"));
  CHECK(s.state()["diagram"] == merged["diagram"]);
  CHECK(s.state()["script"] == merged["script"]);

  // A fresh mutation drops the redo queue.
  s.handle_line(line(4, "edit/undo"));
  s.handle_line(line(5, "op/merge", {{"x", "m2"}, {"y", "m2_0"}}));
  s.handle_line(line(6, "edit/redo"));
  out = c.take();
  CHECK((*response(out, 6))["error"]["code"] == "Refused");

  // Failed mutations leave no undo entry.
  std::size_t depth = s.state()["undo"];
  s.handle_line(line(7, "op/split", {{"edge", "nowhere"}}));
  CHECK(s.state()["undo"] == depth);
  out = c.take();
  CHECK(out.size() == 1);
}

TEST_CASE("edit mode steps through a recording") {
  Capture c;
  Session s(c.sink());
  StartOptions o;
  o.script = demo_script();
  o.edit = true;
  s.start(demo(), o);
  auto out = c.take();
  REQUIRE(out.size() == 1);
  CHECK(out[0]["params"]["redo"] == 9);
  for (int i = 0; i < 8; ++i) s.handle_line(line(10 + i, "edit/redo"));
  out = c.take();
  for (int i = 0; i < 8; ++i) CHECK_FALSE(response(out, 10 + i)->contains("error"));
  CHECK(s.state()["obligations"].empty());
  s.handle_line(line(30, "edit/undo"));
  s.handle_line(line(31, "edit/redo"));
  s.handle_line(line(32, "edit/redo"));
  CHECK(s.state()["outcome"] == "succeeded");
}

TEST_CASE("lemma application over the protocol") {
  Capture c;
  Session s(c.sink());
  StartOptions o;
  o.script = demo_script();
  o.script->resize(6);
  s.start(demo(), o);
  c.take();

  s.handle_line(line(1, "lemma/list"));
  s.handle_line(line(2, "lemma/open", {{"lemma", "Hf"}}));
  s.handle_line(line(3, "lemma/match", {{"pattern", "mac"}, {"target", "mac"}}));
  s.handle_line(line(4, "lemma/match", {{"pattern", "mab"}, {"target", "mab"}}));
  s.handle_line(line(5, "lemma/apply"));
  s.handle_line(line(6, "op/solve", {{"goal", "Goal-0-2"}}));
  s.handle_line(line(7, "proof/finish"));
  auto out = c.take();
  const json& list = (*response(out, 1))["result"];
  REQUIRE(list.size() == 1);
  CHECK(list[0]["name"] == "Hf");
  CHECK(list[0]["admissible"] == true);
  CHECK((*response(out, 4))["result"]["unifier"]["m"] == "m'");
  CHECK((*response(out, 5))["result"]["conclusion"] == "Hf");
  CHECK_FALSE(response(out, 6)->contains("error"));
  const json& fin = (*response(out, 7))["result"];
  CHECK(fin["obligations"].empty());
  CHECK(fin["saved"] == false);
  CHECK(s.closed());

  ReplayResult again = replay(parse_script(fin["script"].get<std::string>()), demo());
  CHECK(again.ok());
  CHECK(again.session.obligations().empty());
}

TEST_CASE("proof/finish saves atomically") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "catdiag_server_test";
  fs::create_directories(dir);
  std::string path = (dir / "out.diag").string();
  Capture c;
  Session s(c.sink());
  StartOptions o;
  o.save_path = path;
  s.start(demo(), o);
  s.handle_line(line(1, "op/merge", {{"x", "m3"}, {"y", "m3_0"}}));
  s.handle_line(line(2, "proof/finish"));
  CHECK(slurp(path) == "merge m3 m3_0\nsucceed\n");
  auto out = c.take();
  CHECK((*response(out, 2))["result"]["obligations"] == json::array({"Goal-0"}));
  fs::remove_all(dir);
}

TEST_CASE("layout requests") {
  Capture c;
  Session s(c.sink());
  s.start(demo());
  c.take();
  s.handle_line(line(1, "layout/drag", {{"node", "a"}, {"x", 10}, {"y", 20}}));
  s.handle_line(line(2, "layout/pin", {{"node", "a"}, {"pinned", false}}));
  s.handle_line(line(3, "layout/drag", {{"node", "zz"}, {"x", 10}, {"y", 20}}));
  auto out = c.take();
  const json& a = (*response(out, 1))["result"]["nodes"]["a"];
  CHECK(a["x"] == 10.0);
  CHECK(a["pinned"] == true);
  CHECK((*response(out, 2))["result"]["nodes"]["a"]["pinned"] == false);
  CHECK((*response(out, 3))["error"]["code"] == "UnknownNode");
}

TEST_CASE("fuzzed input gets exactly one response per request") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> methods{"state/get", "op/merge", "op/split", "op/compose", "op/insert",
                                         "op/solve", "op/decompose", "lemma/list", "lemma/open", "lemma/match",
                                         "lemma/unmatch", "lemma/apply", "lemma/cancel", "layout/get",
                                         "layout/drag", "layout/pin", "edit/undo", "edit/redo", "solve/cancel",
                                         "bogus"};
  const std::vector<std::string> names{"a", "b", "m1", "m3", "m3_0", "mab", "Goal-0", "Hf", "m", "x"};
  auto pick = [&](const auto& v) { return v[rng() % v.size()]; };
  Capture c;
  Session s(c.sink());
  s.start(demo());
  c.take();
  std::map<int, int> sent;
  int next = 1;
  for (int i = 0; i < 4000; ++i) {
    std::string text;
    switch (rng() % 6) {
      case 0: {
        text = line(next, pick(methods));
        sent[next++] = 0;
        break;
      }
      case 1: {
        json p = {{"x", pick(names)}, {"y", pick(names)}, {"edge", pick(names)}, {"goal", pick(names)},
                  {"lemma", pick(names)}, {"pattern", pick(names)}, {"target", pick(names)},
                  {"node", pick(names)}, {"name", pick(names)}, {"path", {pick(names)}},
                  {"x", double(rng() % 500)}, {"y", double(rng() % 500)}, {"depth", 2}};
        text = line(next, pick(methods), p);
        sent[next++] = 0;
        break;
      }
      case 2: {
        text = line(next, pick(methods));
        text.resize(rng() % text.size());
        break;
      }
      case 3: {
        for (int k = 0, n = int(rng() % 40); k < n; ++k) text.push_back(char(rng() % 256));
        break;
      }
      case 4: {
        json p = json::array({rng() % 3 ? json(nullptr) : json(pick(names))});
        text = line(next, pick(methods), p);
        sent[next++] = 0;
        break;
      }
      default: {
        text = R"({"kind":"request","method":")" + pick(methods) + R"(","id":)" + std::to_string(next) + "}";
        sent[next++] = 0;
      }
    }
    s.handle_line(text);
    if (s.closed()) break;
  }
  for (const auto& e : c.take()) {
    if (e["kind"] == "response") {
      REQUIRE(sent.count(e["id"].get<int>()));
      ++sent[e["id"].get<int>()];
    }
  }
  for (const auto& [id, n] : sent) {
    CAPTURE(id);
    CHECK(n == 1);
  }
}

TEST_CASE("solve/cancel interrupts a running solve") {
  // Words over an endomorphism grow without bound; the goal is false.
  Context ctx = parse_context(
      "category C\nobject a : C\nmorphism f g h k : a -> a in C\n"
      "hypothesis H1 : f = f . g\nhypothesis H2 : f = f . h\n"
      "hypothesis H3 : k = k . g\nhypothesis H4 : k = k . h\ngoal G : f = k\n");
  Capture c;
  Session s(c.sink());
  s.start(ctx);
  c.take();
  std::uint64_t seq = s.receive(line(1, "op/solve", {{"goal", "G"}, {"depth", 60}}));
  auto t0 = std::chrono::steady_clock::now();
  std::thread canceller([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    s.receive(line(2, "solve/cancel"));
  });
  s.handle(seq, line(1, "op/solve", {{"goal", "G"}, {"depth", 60}}));
  canceller.join();
  auto out = c.take();
  CHECK((*response(out, 1))["error"]["code"] == "Cancelled");
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
  // A cancel queued behind a solve applies to it before it starts.
  std::uint64_t later = s.receive(line(3, "op/solve", {{"goal", "G"}, {"depth", 60}}));
  s.receive(line(4, "solve/cancel"));
  s.handle(later, line(3, "op/solve", {{"goal", "G"}, {"depth", 60}}));
  out = c.take();
  CHECK((*response(out, 3))["error"]["code"] == "Cancelled");
  // Cancels do not leak into later solves.
  s.handle_line(line(5, "op/solve", {{"goal", "G"}, {"depth", 2}}));
  out = c.take();
  CHECK((*response(out, 5))["error"]["code"] == "SolveFailed");
}

TEST_CASE("stdio stream serving") {
  Capture c;
  Session s(c.sink());
  s.start(demo());
  c.take();
  std::istringstream in(line(1, "op/merge", {{"x", "m3"}, {"y", "m3_0"}}) + "\n\n" + line(2, "state/get") + "\n" +
                        line(3, "proof/fail") + "\n" + line(4, "state/get") + "\n");
  serve_stream(s, in);
  auto out = c.take();
  CHECK(response(out, 1));
  CHECK(response(out, 3));
  CHECK_FALSE(response(out, 4));
  CHECK(s.closed());
}

namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;

struct WsClient {
  asio::io_context io;
  websocket::stream<asio::ip::tcp::socket> ws{io};

  explicit WsClient(unsigned short port) {
    asio::ip::tcp::resolver r(io);
    asio::connect(ws.next_layer(), r.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/");
  }

  void send(const std::string& s) { ws.write(asio::buffer(s)); }

  std::optional<json> recv() {
    beast::flat_buffer b;
    beast::error_code ec;
    ws.read(b, ec);
    if (ec) return std::nullopt;
    return json::parse(beast::buffers_to_string(b.data()));
  }
};

} // namespace

TEST_CASE("websocket transport matches stdio") {
  namespace fs = std::filesystem;
  std::atomic<bool> stop{false};
  std::promise<unsigned short> bound;
  std::thread server([&] {
    serve_websocket(0, CATDIAG_CORPUS_DIR, {}, &stop, [&](unsigned short p) { bound.set_value(p); });
  });
  unsigned short port = bound.get_future().get();

  std::vector<std::string> lines{line(2, "op/merge", {{"x", "m3"}, {"y", "m3_0"}}),
                                 "garbage",
                                 line(3, "op/split", {{"edge", "nowhere"}}),
                                 line(4, "lemma/list"),
                                 line(5, "edit/undo"),
                                 line(6, "proof/fail")};

  std::vector<json> via_ws;
  {
    WsClient bad(port);
    bad.send(line(1, "state/get"));
    CHECK((*bad.recv())["error"]["code"] == "Refused");
    bad.send(line(2, "session/open", {{"exercise", "../demo"}}));
    CHECK((*bad.recv())["error"]["code"] == "ProtocolError");
    bad.send(line(3, "session/open", {{"exercise", "missing"}}));
    CHECK((*bad.recv())["error"]["code"] == "IoError");
  }
  {
    WsClient ws(port);
    ws.send(line(1, "session/open", {{"exercise", "demo"}}));
    auto opened = ws.recv();
    REQUIRE(opened);
    CHECK((*opened)["result"]["exercise"] == "demo");
    for (const auto& l : lines) ws.send(l);
    while (auto e = ws.recv()) via_ws.push_back(*e);
  }
  stop = true;
  server.join();

  Capture c;
  Session s(c.sink());
  s.start(demo());
  for (const auto& l : lines) s.handle_line(l);
  std::vector<json> via_stdio = c.take();
  CHECK(via_ws == via_stdio);
}
