#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "teleop/simulation.hpp"

namespace teleop::bridge {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;        ///< 0 picks a free port
  std::filesystem::path static_dir;  ///< cockpit files served under /
  double deadman = 0.25;             ///< s
};

/// Websocket endpoint /teleop plus static files. The simulation runs on its
/// own thread paced at the sample rate; connections are handled on another.
/// The first client that sends a command holds the controls until it
/// disconnects; the others observe.
class Server {
 public:
  Server(ScenarioConfig config, ModelSet models, ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Port actually bound.
  unsigned short port() const;

  /// Serves until stop() is called.
  void run();

  /// Safe from any thread.
  void stop();

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

}  // namespace teleop::bridge
