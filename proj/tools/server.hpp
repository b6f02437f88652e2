#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "medchain/medchain.h"

namespace httplib {
class Server;
}

namespace medchain::tools {

// Computes the Sec-WebSocket-Accept value for a client key.
std::string websocket_accept(const std::string& client_key);
// Encodes one unmasked server-to-client frame.
std::string websocket_frame(unsigned char opcode, const std::string& payload);

// HTTP/JSON + WebSocket front end over one in-memory session.
class OpsServer {
 public:
  OpsServer();
  ~OpsServer();
  OpsServer(const OpsServer&) = delete;
  OpsServer& operator=(const OpsServer&) = delete;

  // Starts a session on the scenario (file path or bundled id). Returns the
  // status; on failure the current session is kept.
  medchain_status open_session(const std::string& scenario, std::string* error = nullptr);

  // Binds and returns the port (port 0 picks a free one), or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind.
  bool listen();
  void stop();

 private:
  struct Stream {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::string> queue;
    bool closed = false;
  };

  static void on_broadcast(uint64_t revision, const char* payload, void* user);
  void push(const std::string& payload);
  void routes();

  std::unique_ptr<httplib::Server> http_;
  std::shared_mutex session_mu_;
  medchain_session* session_ = nullptr;
  std::mutex streams_mu_;
  std::vector<std::shared_ptr<Stream>> streams_;
  std::atomic<bool> stopping_{false};
};

}  // namespace medchain::tools
