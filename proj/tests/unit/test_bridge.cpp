#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "teleop/bridge/protocol.hpp"
#include "teleop/bridge/server.hpp"
#include "teleop/bridge/session.hpp"
#include "teleop/error.hpp"

using namespace teleop;
using namespace teleop::bridge;

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = boost::asio::ip::tcp;

namespace {

CommandMsg command(std::uint64_t seq, double v, double omega = 0.0) {
  CommandMsg c;
  c.seq = seq;
  c.v_norm = v;
  c.omega_norm = omega;
  return c;
}

ScenarioConfig session_config(RunCase mode = RunCase::kIdeal) {
  ScenarioConfig c;
  c.run_case = mode;
  c.seed = 21;
  return c;
}

}  // namespace

TEST(Protocol, CommandRoundTrip) {
  CommandMsg c = command(7, 0.25, -0.5);
  c.client_time = 12.5;
  EXPECT_EQ(std::get<CommandMsg>(decode_client(encode_client(c))), c);
  const ModeMsg m{RunCase::kPredicted};
  EXPECT_EQ(std::get<ModeMsg>(decode_client(encode_client(m))), m);
}

TEST(Protocol, ClampsAxesAndIgnoresExtraFields) {
  const auto c = std::get<CommandMsg>(
      decode_client(R"({"type":"cmd","seq":1,"v":3,"omega":-2,"extra":[1,2]})"));
  EXPECT_EQ(c.v_norm, 1.0);
  EXPECT_EQ(c.omega_norm, -1.0);
  EXPECT_EQ(c.client_time, 0.0);
}

TEST(Protocol, RejectsMalformedInput) {
  EXPECT_THROW(decode_client("not json"), ParseError);
  EXPECT_THROW(decode_client(R"({"type":"cmd","v":0,"omega":0})"), ParseError);
  EXPECT_THROW(decode_client(R"({"type":"cmd","seq":1,"v":"fast","omega":0})"), ParseError);
  EXPECT_THROW(decode_client(R"({"type":"mode","mode":"warp"})"), ParseError);
  EXPECT_THROW(decode_client(R"({"type":"teleport"})"), ParseError);
  EXPECT_THROW(decode_frame(R"({"type":"cmd"})"), ParseError);
}

TEST(Protocol, FrameRoundTripIsCompact) {
  StateFrame f;
  f.seq = 99;
  f.server_time = 9.9;
  f.run_time = 1.2;
  f.mode = RunCase::kDelayed;
  f.pose = {1.5, -2.25, 0.75};
  f.velocity = Vec2(0.1, -0.2);
  f.x_m = Vec2(0.3, 0.4);
  f.force_feedback = Vec2(-0.01, 0.02);
  f.f_e = Vec2(0.5, 0.6);
  f.slip = {0.1, 0.2};
  f.delay_forward = 1.1;
  f.delay_backward = 0.9;
  f.backlog_forward = 11;
  f.backlog_backward = 9;
  f.omega = Vec2(2.0, 3.0);
  f.gamma = Vec2(4.0, 5.0);
  f.progress = 0.5;
  f.lateral = -0.1;
  f.finished = true;
  f.controlled = true;
  const std::string text = encode_frame(f);
  EXPECT_LT(text.size(), 2048u);
  const StateFrame g = decode_frame(text);
  EXPECT_EQ(g.seq, f.seq);
  EXPECT_EQ(g.mode, f.mode);
  EXPECT_EQ(g.pose.y, f.pose.y);
  EXPECT_EQ(g.velocity, f.velocity);
  EXPECT_EQ(g.force_feedback, f.force_feedback);
  EXPECT_EQ(g.slip, f.slip);
  EXPECT_EQ(g.backlog_forward, 11u);
  EXPECT_EQ(g.backlog_backward, 9u);
  EXPECT_EQ(g.gamma, f.gamma);
  EXPECT_TRUE(g.finished);
  EXPECT_TRUE(g.controlled);
}

TEST(Session, IdleVehicleStaysPut) {
  Session s(session_config());
  StateFrame f;
  for (int k = 0; k < 50; ++k) f = s.step();
  EXPECT_EQ(f.seq, 50u);
  EXPECT_FALSE(f.controlled);
  EXPECT_NEAR(f.velocity.norm(), 0.0, 1e-3);
}

TEST(Session, HeldForwardCommandDrivesAhead) {
  Session s(session_config());
  StateFrame f;
  for (std::uint64_t k = 1; k <= 300; ++k) {
    s.handle(command(k, 1.0));
    f = s.step();
  }
  EXPECT_TRUE(f.controlled);
  const double v_max = s.simulation().config().ugv.v_max;
  // Felt slip resistance holds the hand below the full reference.
  EXPECT_GT(f.x_m[0], 0.5 * v_max);
  EXPECT_LE(f.x_m[0], v_max);
  EXPECT_GT(f.velocity[0], 0.3 * v_max);
  EXPECT_LE(f.velocity[0], f.x_m[0] + 1e-9);
  EXPECT_GT(f.pose.x, 0.5);
}

TEST(Session, DeadmanDropsStaleInput) {
  Session s(session_config());
  s.handle(command(1, 1.0));
  EXPECT_TRUE(s.step().controlled);
  EXPECT_TRUE(s.step().controlled);
  StateFrame f;
  for (int k = 0; k < 3; ++k) f = s.step();
  EXPECT_FALSE(f.controlled);
  s.handle(command(1, 1.0));
  EXPECT_TRUE(s.step().controlled);
}

TEST(Session, StaleSequenceIsIgnored) {
  Session s(session_config());
  s.handle(command(5, 1.0));
  s.handle(command(4, -1.0));
  StateFrame f;
  for (int k = 0; k < 30; ++k) {
    s.handle(command(5, -1.0));
    s.handle(command(static_cast<std::uint64_t>(6 + k), 1.0));
    f = s.step();
  }
  EXPECT_GT(f.x_m[0], 0.0);
}

TEST(Session, DelayedModeLagsTheCommand) {
  Session s(session_config(RunCase::kDelayed));
  std::optional<double> moved;
  for (std::uint64_t k = 1; k <= 40; ++k) {
    s.handle(command(k, 1.0));
    const auto f = s.step();
    if (!moved && f.velocity[0] > 1e-3) moved = f.run_time;
  }
  ASSERT_TRUE(moved);
  EXPECT_GE(*moved, 0.75);
  EXPECT_LE(*moved, 1.5);
}

TEST(Session, ModeSwitchRestartsTheRun) {
  Session s(session_config());
  for (std::uint64_t k = 1; k <= 30; ++k) {
    s.handle(command(k, 1.0));
    s.step();
  }
  s.handle(ModeMsg{RunCase::kDelayed});
  EXPECT_EQ(s.mode(), RunCase::kDelayed);
  const auto f = s.step();
  EXPECT_EQ(f.seq, 31u);
  EXPECT_EQ(f.run_time, 0.0);
  EXPECT_EQ(f.backlog_forward, 0u);
  EXPECT_EQ(f.pose.x, 0.0);
  EXPECT_FALSE(f.controlled);
  EXPECT_EQ(f.mode, RunCase::kDelayed);
  EXPECT_THROW(Session(session_config(), {}, 0.0), ConfigError);
}

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "teleop_bridge_test";
    std::filesystem::create_directories(dir_);
    std::ofstream(dir_ / "index.html") << "<html>cockpit</html>";
    ServerOptions o;
    o.port = 0;
    o.static_dir = dir_;
    server_ = std::make_unique<Server>(session_config(), ModelSet{}, o);
    thread_ = std::thread([this] { server_->run(); });
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  std::unique_ptr<websocket::stream<tcp::socket>> connect() {
    auto ws = std::make_unique<websocket::stream<tcp::socket>>(ioc_);
    tcp::resolver resolver(ioc_);
    boost::asio::connect(ws->next_layer(),
                         resolver.resolve("127.0.0.1", std::to_string(server_->port())));
    ws->handshake("127.0.0.1", "/teleop");
    return ws;
  }

  static std::string read_text(websocket::stream<tcp::socket>& ws) {
    beast::flat_buffer buf;
    ws.read(buf);
    return beast::buffers_to_string(buf.data());
  }

  // Reads until a message of `type` arrives, at most `limit` messages.
  static std::optional<std::string> read_until(websocket::stream<tcp::socket>& ws,
                                               const std::string& type, int limit = 50) {
    for (int i = 0; i < limit; ++i) {
      auto text = read_text(ws);
      if (text.find("\"type\":\"" + type + "\"") != std::string::npos) return text;
    }
    return std::nullopt;
  }

  http::response<http::string_body> get(const std::string& target) {
    tcp::socket sock(ioc_);
    tcp::resolver resolver(ioc_);
    boost::asio::connect(sock, resolver.resolve("127.0.0.1", std::to_string(server_->port())));
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(sock, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(sock, buf, res);
    return res;
  }

  std::filesystem::path dir_;
  boost::asio::io_context ioc_;
  std::unique_ptr<Server> server_;
  std::thread thread_;
};

TEST_F(ServerTest, StreamsFramesAtTheSampleRate) {
  auto ws = connect();
  const auto first = decode_frame(*read_until(*ws, "frame"));
  const auto start = std::chrono::steady_clock::now();
  StateFrame last;
  for (int i = 0; i < 10; ++i) last = decode_frame(*read_until(*ws, "frame"));
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(last.seq, first.seq + 10);
  EXPECT_GT(elapsed, 0.7);
  EXPECT_LT(elapsed, 2.0);
}

TEST_F(ServerTest, CommandsTakeEffect) {
  auto ws = connect();
  ws->text(true);
  for (std::uint64_t k = 1; k <= 10; ++k) {
    ws->write(boost::asio::buffer(encode_client(command(k, 1.0))));
    read_until(*ws, "frame");
  }
  const auto f = decode_frame(*read_until(*ws, "frame"));
  EXPECT_TRUE(f.controlled);
  EXPECT_GT(f.x_m[0], 0.0);
}

TEST_F(ServerTest, MalformedMessageGetsErrorFrame) {
  auto ws = connect();
  ws->text(true);
  ws->write(boost::asio::buffer(std::string("{oops")));
  EXPECT_TRUE(read_until(*ws, "error"));
  ws->write(boost::asio::buffer(encode_client(command(1, 0.5))));
  EXPECT_TRUE(read_until(*ws, "frame"));
}

TEST_F(ServerTest, SecondClientCannotSteal) {
  auto a = connect();
  auto b = connect();
  a->text(true);
  b->text(true);
  a->write(boost::asio::buffer(encode_client(command(1, 1.0))));
  read_until(*a, "frame");
  read_until(*a, "frame");
  b->write(boost::asio::buffer(encode_client(command(1, -1.0))));
  const auto err = read_until(*b, "error");
  ASSERT_TRUE(err);
  EXPECT_NE(err->find("another client"), std::string::npos);
  a->close(websocket::close_code::normal);
  b->write(boost::asio::buffer(encode_client(command(2, -1.0))));
  for (int i = 0; i < 5; ++i) {
    const auto text = read_text(*b);
    EXPECT_EQ(text.find("\"type\":\"error\""), std::string::npos);
  }
}

TEST_F(ServerTest, ServesStaticFiles) {
  const auto index = get("/");
  EXPECT_EQ(index.result(), http::status::ok);
  EXPECT_EQ(index.body(), "<html>cockpit</html>");
  EXPECT_EQ(index[http::field::content_type], "text/html");
  EXPECT_EQ(get("/missing.js").result(), http::status::not_found);
  EXPECT_EQ(get("/../secret").result(), http::status::not_found);
}
