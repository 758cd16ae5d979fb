#include "teleop/bridge/server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "teleop/bridge/session.hpp"
#include "teleop/error.hpp"

namespace teleop::bridge {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

constexpr std::size_t kMaxQueuedFrames = 32;

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><title>teleop</title></head><body>"
    "<p>Cockpit files were not found. Connect a websocket client to <code>/teleop</code>.</p>"
    "</body></html>";

const char* mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

struct Release {};
using Inbound = std::variant<ClientMessage, Release>;

}  // namespace

class WsConnection;

struct Server::Impl : std::enable_shared_from_this<Server::Impl> {
  Impl(ScenarioConfig config, ModelSet models, ServerOptions opts)
      : session(std::move(config), std::move(models), opts.deadman),
        options(std::move(opts)),
        acceptor(ioc) {
    const tcp::endpoint ep(net::ip::make_address(options.address), options.port);
    beast::error_code ec;
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw Error("cannot listen on " + options.address + ":" +
                        std::to_string(options.port) + ": " + ec.message());
  }

  void accept();
  void simulate();
  void push(Inbound msg) {
    std::lock_guard lock(inbox_mutex);
    inbox.push_back(std::move(msg));
  }
  void broadcast(const std::shared_ptr<const std::string>& text);
  void on_message(WsConnection* from, const std::string& text);
  void on_close(WsConnection* conn);
  http::response<http::string_body> serve_file(const http::request<http::string_body>& req) const;

  Session session;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::atomic<bool> stopping{false};

  std::mutex inbox_mutex;
  std::deque<Inbound> inbox;

  // Touched only on the I/O thread.
  std::set<std::shared_ptr<WsConnection>> connections;
  WsConnection* controller = nullptr;
};

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, std::shared_ptr<Server::Impl> server)
      : ws_(std::move(socket)), server_(std::move(server)) {}

  void start(http::request<http::string_body> req) {
    ws_.text(true);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->close();
      self->server_->connections.insert(self);
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> text) {
    if (queue_.size() >= kMaxQueuedFrames) queue_.erase(queue_.begin() + 1);
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_->on_message(self.get(), text);
      self->read();
    });
  }

  void write() {
    ws_.async_write(net::buffer(*queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) return self->close();
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    server_->on_close(this);
    server_->connections.erase(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<Server::Impl> server_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, std::shared_ptr<Server::Impl> server)
      : stream_(std::move(socket)), server_(std::move(server)) {}

  void start() {
    req_ = {};
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (!ec) self->dispatch();
                     });
  }

 private:
  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/teleop") {
        std::make_shared<WsConnection>(stream_.release_socket(), server_)->start(std::move(req_));
      }
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>(server_->serve_file(req_));
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec || !res->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->start();
                      });
  }

  beast::tcp_stream stream_;
  std::shared_ptr<Server::Impl> server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

void Server::Impl::accept() {
  acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<HttpConnection>(std::move(socket), self)->start();
    self->accept();
  });
}

void Server::Impl::simulate() {
  const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(session.simulation().config().sample_period));
  auto next = std::chrono::steady_clock::now();
  while (!stopping.load()) {
    std::deque<Inbound> batch;
    {
      std::lock_guard lock(inbox_mutex);
      batch.swap(inbox);
    }
    for (auto& m : batch) {
      if (std::holds_alternative<Release>(m)) {
        session.release();
      } else {
        session.handle(std::get<ClientMessage>(m));
      }
    }
    auto text = std::make_shared<const std::string>(encode_frame(session.step()));
    net::post(ioc, [self = shared_from_this(), text] { self->broadcast(text); });
    next += period;
    std::this_thread::sleep_until(next);
  }
}

void Server::Impl::broadcast(const std::shared_ptr<const std::string>& text) {
  for (const auto& c : connections) c->send(text);
}

void Server::Impl::on_message(WsConnection* from, const std::string& text) {
  const auto reply = [&](const std::string& msg) {
    for (const auto& c : connections) {
      if (c.get() == from) c->send(std::make_shared<const std::string>(encode_error(msg)));
    }
  };
  ClientMessage msg;
  try {
    msg = decode_client(text);
  } catch (const ParseError& e) {
    return reply(e.what());
  }
  if (controller && controller != from) return reply("another client holds the controls");
  controller = from;
  push(std::move(msg));
}

void Server::Impl::on_close(WsConnection* conn) {
  if (controller != conn) return;
  controller = nullptr;
  push(Release{});
}

http::response<http::string_body> Server::Impl::serve_file(
    const http::request<http::string_body>& req) const {
  http::response<http::string_body> res{http::status::ok, req.version()};
  res.keep_alive(req.keep_alive());
  std::string target(req.target().substr(0, req.target().find('?')));
  if (target.empty() || target.back() == '/') target += "index.html";

  std::filesystem::path file;
  if (!options.static_dir.empty() && target.find("..") == std::string::npos) {
    file = options.static_dir / target.substr(1);
  }
  if (!file.empty() && std::filesystem::is_regular_file(file)) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    res.set(http::field::content_type, mime_type(file));
    res.body() = body.str();
  } else if (target == "/index.html") {
    res.set(http::field::content_type, "text/html");
    res.body() = kPlaceholderPage;
  } else {
    res.result(http::status::not_found);
    res.set(http::field::content_type, "text/plain");
    res.body() = "not found\n";
  }
  res.prepare_payload();
  return res;
}

Server::Server(ScenarioConfig config, ModelSet models, ServerOptions options)
    : impl_(std::make_shared<Impl>(std::move(config), std::move(models), std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept();
  std::thread sim([impl = impl_] { impl->simulate(); });
  impl_->ioc.run();
  impl_->stopping = true;
  sim.join();
}

void Server::stop() {
  impl_->stopping = true;
  impl_->ioc.stop();
}

}  // namespace teleop::bridge
