// Copyright 2026 The guandan-dmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Live games over HTTP + WebSocket. Message schema: docs/protocol.md.

#ifndef GUANDAN_PLAYSERVICE_H_
#define GUANDAN_PLAYSERVICE_H_

#include <array>
#include <atomic>
#include <boost/asio/any_io_executor.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/asio/thread_pool.hpp>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "guandan/engine.h"
#include "guandan/evalharness.h"
#include "json.hpp"

namespace guandan {

class ProtocolError : public GuandanError {
 public:
  using GuandanError::GuandanError;
};

struct SeatSpec {
  bool human = false;
  std::string bot;  // policy name for bot seats
};

struct SessionConfig {
  std::array<SeatSpec, kNumPlayers> seats;
  std::uint64_t seed = 1;
};

// Accepts {"seats": ["human", "bot", "bot:random", ...], "seed": 7}.
// "bot" means the server's default bot. Throws ProtocolError.
SessionConfig parse_session_config(const nlohmann::json& body, const std::vector<std::string>& bot_names);

// Bot policies by name. "bot" is the default entry.
using BotTable = std::map<std::string, std::shared_ptr<const Policy>>;

// One game. Every mutation runs on the session's strand; the public methods
// only post work there and may be called from any thread.
class Session : public std::enable_shared_from_this<Session> {
 public:
  using Sink = std::function<void(std::string)>;

  Session(std::string id, SessionConfig config, const BotTable& bots, boost::asio::any_io_executor executor,
          boost::asio::thread_pool& bot_pool, double bot_timeout_s);

  // Play begins once start() was called and every human seat is attached.
  void start();
  // Binds a connection to a human seat. A later attach to the same seat
  // replaces the earlier one (reconnect). Replies with hello and a fresh state,
  // or with reject if the seat is not a free human seat.
  void attach(int seat, Sink sink, std::uint64_t token);
  void detach(int seat, std::uint64_t token);
  // Handles an "action" or "chat" message from `seat`.
  void submit(int seat, nlohmann::json message);

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }
  bool over() const { return over_; }
  bool wait_until_over(double timeout_s) const;
  nlohmann::json summary() const;
  // Accepted moves in order, as {"seat", "action"} objects.
  nlohmann::json move_log() const;
  std::uint64_t bot_timeouts() const { return bot_timeouts_; }

  // Seat-private snapshot; exposed for tests.
  nlohmann::json state_view(int seat) const;

 private:
  void maybe_begin();
  void send(int seat, const nlohmann::json& msg);
  void broadcast(const nlohmann::json& msg);
  void broadcast_state();
  void prompt();
  void schedule_bot();
  void apply(int seat, const CardGroup& action);
  void reject(int seat, const std::string& reason);

  const std::string id_;
  const SessionConfig config_;
  std::array<std::shared_ptr<const Policy>, kNumPlayers> bots_;
  boost::asio::strand<boost::asio::any_io_executor> strand_;
  boost::asio::thread_pool& bot_pool_;
  boost::asio::steady_timer watchdog_;
  const double bot_timeout_s_;
  HeuristicPolicy fallback_;

  Game game_;
  std::mt19937_64 rng_;
  std::array<Sink, kNumPlayers> sinks_;
  std::array<std::uint64_t, kNumPlayers> tokens_{};
  std::uint64_t moves_ = 0;
  std::atomic<std::uint64_t> bot_timeouts_{0};
  int rounds_done_ = 0;
  bool start_requested_ = false;
  bool begun_ = false;

  mutable std::mutex log_mu_;
  nlohmann::json log_ = nlohmann::json::array();
  nlohmann::json last_round_;
  mutable std::condition_variable over_cv_;
  std::atomic<bool> over_{false};
};

struct ServeOptions {
  std::string checkpoint;  // greedy bot network; heuristic bots without it
  std::string host = "127.0.0.1";
  int port = 8080;         // 0 picks a free port
  std::string static_dir;
  double bot_timeout_s = 5;
  int threads = 2;
};

class Server {
 public:
  explicit Server(ServeOptions options);
  ~Server();
  // Binds and starts serving on background threads; returns the port.
  int start();
  void stop();
  // Session registry, for tests and the /sessions endpoint.
  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<Session> create(const nlohmann::json& body);
  nlohmann::json list() const;

  struct Impl;  // shared with the connection classes in playservice.cc

 private:
  std::unique_ptr<Impl> impl_;
};

// Serves until SIGINT or SIGTERM. Returns an exit code.
int run_server(const ServeOptions& options);

}  // namespace guandan

#endif  // GUANDAN_PLAYSERVICE_H_
