#include "catdiag/server.hpp"

#include "catdiag/error.hpp"
#include "catdiag/parser.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <thread>

namespace catdiag {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

bool valid_exercise(const std::string& s) {
  if (s.empty() || s.size() > 128) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

class Connection : public std::enable_shared_from_this<Connection> {
public:
  Connection(tcp::socket socket, std::string exercises, SessionOptions opts)
      : ws_(std::move(socket)), exercises_(std::move(exercises)), opts_(std::move(opts)),
        session_([this](const std::string& line) { send(line); }) {
    session_.set_prestart([this](Session& s, const std::string& method, const json& params) { return open(s, method, params); });
  }

  void run() {
    auto self = shared_from_this();
    // The worker owns a reference, so the connection outlives a running request.
    std::thread([self] { self->work(); }).detach();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self](beast::error_code ec) {
      if (!ec) self->read();
    });
  }

  void shutdown() {
    {
      std::lock_guard<std::mutex> lock(m_);
      stopping_ = true;
    }
    cv_.notify_one();
    auto self = shared_from_this();
    asio::post(ws_.get_executor(), [self] {
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
    });
  }

private:
  json open(Session& s, const std::string& method, const json& params) {
    if (method != "session/open") throw Error(Errc::Refused, "the first request must be session/open");
    if (!params.is_object() || !params.contains("exercise") || !params["exercise"].is_string())
      throw Error(Errc::Protocol, "parameter 'exercise' must be a string");
    std::string name = params["exercise"].get<std::string>();
    if (!valid_exercise(name)) throw Error(Errc::Protocol, "invalid exercise name");
    std::string path = (std::filesystem::path(exercises_) / (name + ".ctx")).string();
    if (!std::filesystem::is_regular_file(path)) throw Error(Errc::Io, "unknown exercise '" + name + "'");
    Context ctx = parse_context(read_file(path));
    StartOptions so;
    so.session = opts_;
    // The response precedes state/init; start runs after it is sent.
    pending_start_ = [&s, ctx = std::move(ctx), so = std::move(so)]() mutable { s.start(std::move(ctx), std::move(so)); };
    return {{"exercise", name}};
  }

  void read() {
    auto self = shared_from_this();
    ws_.async_read(buf_, [self](beast::error_code ec, std::size_t) {
      if (ec) {
        self->enqueue_eof();
        return;
      }
      std::string line = beast::buffers_to_string(self->buf_.data());
      self->buf_.consume(self->buf_.size());
      std::uint64_t seq = self->session_.receive(line);
      {
        std::lock_guard<std::mutex> lock(self->m_);
        self->in_.emplace_back(seq, std::move(line));
      }
      self->cv_.notify_one();
      self->read();
    });
  }

  void enqueue_eof() {
    {
      std::lock_guard<std::mutex> lock(m_);
      eof_ = true;
    }
    cv_.notify_one();
  }

  void work() {
    for (;;) {
      std::pair<std::uint64_t, std::string> item;
      {
        std::unique_lock<std::mutex> lock(m_);
        cv_.wait(lock, [&] { return stopping_ || eof_ || !in_.empty(); });
        if (stopping_ || in_.empty()) return;
        item = std::move(in_.front());
        in_.pop_front();
      }
      session_.handle(item.first, item.second);
      if (pending_start_) {
        auto f = std::move(pending_start_);
        pending_start_ = nullptr;
        f();
      }
      if (session_.closed()) {
        close_after_flush();
        return;
      }
    }
  }

  void send(const std::string& line) {
    auto self = shared_from_this();
    asio::post(ws_.get_executor(), [self, line] {
      self->out_.push_back(line);
      if (self->out_.size() == 1) self->write();
    });
  }

  void write() {
    auto self = shared_from_this();
    ws_.text(true);
    ws_.async_write(asio::buffer(out_.front()), [self](beast::error_code ec, std::size_t) {
      if (ec) {
        self->out_.clear();
        return;
      }
      self->out_.pop_front();
      if (!self->out_.empty()) {
        self->write();
      } else if (self->close_when_drained_) {
        self->close();
      }
    });
  }

  void close_after_flush() {
    auto self = shared_from_this();
    asio::post(ws_.get_executor(), [self] {
      self->close_when_drained_ = true;
      if (self->out_.empty()) self->close();
    });
  }

  void close() {
    auto self = shared_from_this();
    ws_.async_close(websocket::close_code::normal, [self](beast::error_code) {});
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buf_;
  std::string exercises_;
  SessionOptions opts_;
  Session session_;
  std::function<void()> pending_start_;

  std::deque<std::string> out_; // io thread only
  bool close_when_drained_ = false;

  std::mutex m_;
  std::condition_variable cv_;
  std::deque<std::pair<std::uint64_t, std::string>> in_;
  bool eof_ = false;
  bool stopping_ = false;
};

} // namespace

void serve_websocket(unsigned short port, const std::string& exercises, const SessionOptions& opts,
                     const std::atomic<bool>* stop, std::function<void(unsigned short)> on_listen) {
  asio::io_context io;
  tcp::acceptor acceptor(io, tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
  if (on_listen) on_listen(acceptor.local_endpoint().port());

  std::vector<std::weak_ptr<Connection>> live;
  std::function<void()> accept = [&] {
    acceptor.async_accept(asio::make_strand(io), [&](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto c = std::make_shared<Connection>(std::move(socket), exercises, opts);
      live.push_back(c);
      c->run();
      accept();
    });
  };
  accept();

  asio::steady_timer timer(io);
  std::function<void()> poll = [&] {
    timer.expires_after(std::chrono::milliseconds(50));
    timer.async_wait([&](beast::error_code) {
      if (stop && stop->load()) {
        beast::error_code ignored;
        acceptor.close(ignored);
        for (auto& w : live) {
          if (auto c = w.lock()) c->shutdown();
        }
        return;
      }
      std::erase_if(live, [](const std::weak_ptr<Connection>& w) { return w.expired(); });
      poll();
    });
  };
  if (stop) poll();
  io.run();
  // Workers still finishing a request hold the executor; wait for them.
  for (int i = 0; i < 200 && std::any_of(live.begin(), live.end(), [](auto& w) { return !w.expired(); }); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
}

} // namespace catdiag
