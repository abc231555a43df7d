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

#include "guandan/playservice.h"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <thread>

#include "guandan/binio.h"
#include "guandan/qnet.h"

namespace guandan {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using json = nlohmann::json;

namespace {

constexpr std::size_t kMaxChat = 500;
constexpr std::size_t kMaxMessageBytes = 64 * 1024;

json cards_json(const CardMultiset& cards) {
  json out = json::array();
  for (Card c : cards.cards()) out.push_back(c.to_string());
  return out;
}

json group_or_null(const std::optional<CardGroup>& g) { return g ? json(g->to_string()) : json(nullptr); }

json levels_json(const std::array<Level, 2>& lv) { return {rank_name(lv[0].rank()), rank_name(lv[1].rank())}; }

json tribute_json(const TributeResult& t) {
  json transfers = json::array();
  for (const auto& x : t.transfers) {
    transfers.push_back({{"from", x.from}, {"to", x.to}, {"card", x.card.to_string()}, {"return", x.is_return}});
  }
  return {{"skipped", t.skipped}, {"cancelled", t.cancelled}, {"leader", t.leader}, {"transfers", transfers}};
}

}  // namespace

SessionConfig parse_session_config(const json& body, const std::vector<std::string>& bot_names) {
  if (!body.is_object()) throw ProtocolError("session config must be a JSON object");
  for (const auto& [key, value] : body.items()) {
    if (key != "seats" && key != "seed") throw ProtocolError("unknown field: " + key);
  }
  if (!body.contains("seats") || !body["seats"].is_array()) throw ProtocolError("seats must be an array");
  const auto& seats = body["seats"];
  if (seats.size() != kNumPlayers) {
    throw ProtocolError("exactly 4 seats required, got " + std::to_string(seats.size()));
  }
  SessionConfig c;
  for (int i = 0; i < kNumPlayers; ++i) {
    if (!seats[i].is_string()) throw ProtocolError("seat entries must be strings");
    const std::string s = seats[i];
    if (s == "human") {
      c.seats[i].human = true;
    } else if (s == "bot" || s.rfind("bot:", 0) == 0) {
      c.seats[i].bot = s == "bot" ? "bot" : s.substr(4);
      if (std::find(bot_names.begin(), bot_names.end(), c.seats[i].bot) == bot_names.end()) {
        throw ProtocolError("unknown bot: " + c.seats[i].bot);
      }
    } else {
      throw ProtocolError("seat must be human, bot or bot:<name>, got " + s);
    }
  }
  if (body.contains("seed")) {
    if (!body["seed"].is_number_integer() || body["seed"].get<long long>() < 0) throw ProtocolError("seed must be a non-negative integer");
    c.seed = body["seed"];
  }
  return c;
}

Session::Session(std::string id, SessionConfig config, const BotTable& bots, asio::any_io_executor executor,
                 asio::thread_pool& bot_pool, double bot_timeout_s)
    : id_(std::move(id)),
      config_(std::move(config)),
      strand_(asio::make_strand(executor)),
      bot_pool_(bot_pool),
      watchdog_(strand_),
      bot_timeout_s_(bot_timeout_s),
      game_(Game::new_episode(config_.seed)),
      rng_(config_.seed ^ 0x5eed5eedull) {
  for (int i = 0; i < kNumPlayers; ++i) {
    if (config_.seats[i].human) continue;
    auto it = bots.find(config_.seats[i].bot);
    if (it == bots.end()) throw ProtocolError("unknown bot: " + config_.seats[i].bot);
    bots_[i] = it->second;
  }
}

void Session::start() {
  asio::dispatch(strand_, [self = shared_from_this()] {
    self->start_requested_ = true;
    self->maybe_begin();
  });
}

void Session::maybe_begin() {
  if (begun_ || !start_requested_) return;
  for (int i = 0; i < kNumPlayers; ++i) {
    if (config_.seats[i].human && !sinks_[i]) return;
  }
  begun_ = true;
  broadcast_state();
  prompt();
}

void Session::attach(int seat, Sink sink, std::uint64_t token) {
  asio::dispatch(strand_, [self = shared_from_this(), seat, sink = std::move(sink), token]() mutable {
    if (seat < 0 || seat >= kNumPlayers || !self->config_.seats[seat].human) {
      sink(json{{"type", "reject"}, {"reason", "seat " + std::to_string(seat) + " is not a human seat"}}.dump());
      return;
    }
    self->sinks_[seat] = std::move(sink);
    self->tokens_[seat] = token;
    json seats = json::array();
    for (const auto& s : self->config_.seats) seats.push_back(s.human ? "human" : "bot:" + s.bot);
    self->send(seat, {{"type", "hello"}, {"session", self->id_}, {"seat", seat}, {"seats", seats}});
    if (!self->begun_) {
      self->maybe_begin();
      return;
    }
    self->send(seat, self->state_view(seat));
    if (!self->over_ && !self->game_.round_over() && self->game_.current_player() == seat) {
      json actions = json::array();
      for (const auto& g : self->game_.legal_actions()) actions.push_back(g.to_string());
      self->send(seat, {{"type", "legal_actions"}, {"seat", seat}, {"actions", actions}});
    }
  });
}

void Session::detach(int seat, std::uint64_t token) {
  asio::dispatch(strand_, [self = shared_from_this(), seat, token] {
    if (seat >= 0 && seat < kNumPlayers && self->tokens_[seat] == token) self->sinks_[seat] = nullptr;
  });
}

void Session::submit(int seat, json message) {
  asio::dispatch(strand_, [self = shared_from_this(), seat, message = std::move(message)] {
    if (seat < 0 || seat >= kNumPlayers || !self->sinks_[seat]) return;  // not bound to this session
    const std::string type = message.value("type", "");
    if (type == "chat") {
      std::string text = message.value("text", "");
      if (text.size() > kMaxChat) text.resize(kMaxChat);
      self->broadcast({{"type", "chat"}, {"seat", seat}, {"text", text}});
      return;
    }
    if (type != "action") {
      self->reject(seat, "unexpected message type: " + type);
      return;
    }
    if (self->over_) {
      self->reject(seat, "episode is over");
      return;
    }
    if (!self->begun_) {
      self->reject(seat, "waiting for players");
      return;
    }
    if (!self->config_.seats[seat].human || self->game_.current_player() != seat) {
      self->reject(seat, "not your turn");
      return;
    }
    const auto legal = self->game_.legal_actions();
    std::optional<CardGroup> chosen;
    try {
      if (message.contains("index")) {
        const auto& idx = message["index"];
        if (!idx.is_number_integer() || idx.get<long long>() < 0 ||
            idx.get<long long>() >= static_cast<long long>(legal.size())) {
          self->reject(seat, "index out of range");
          return;
        }
        chosen = legal[idx.get<std::size_t>()];
      } else if (message.contains("action") && message["action"].is_string()) {
        chosen = CardGroup::parse(message["action"].get<std::string>(), self->game_.round().round_level);
      } else {
        self->reject(seat, "action message needs \"action\" or \"index\"");
        return;
      }
    } catch (const GuandanError& e) {
      self->reject(seat, std::string("cannot read action: ") + e.what());
      return;
    }
    const auto& r = self->game_.round();
    std::string why = check_action(r.hands[seat], r.to_beat, r.round_level, *chosen);
    if (!why.empty()) {
      self->reject(seat, why);
      return;
    }
    self->apply(seat, *chosen);
  });
}

bool Session::wait_until_over(double timeout_s) const {
  std::unique_lock lock(log_mu_);
  return over_cv_.wait_for(lock, std::chrono::duration<double>(timeout_s), [&] { return over_.load(); });
}

json Session::summary() const {
  std::lock_guard lock(log_mu_);
  json seats = json::array();
  for (const auto& s : config_.seats) seats.push_back(s.human ? "human" : "bot:" + s.bot);
  return {{"id", id_}, {"seats", seats}, {"seed", config_.seed}, {"moves", log_.size()},
          {"rounds", rounds_done_}, {"over", over_.load()}, {"bot_timeouts", bot_timeouts_.load()},
          {"last_round", last_round_}};
}

json Session::move_log() const {
  std::lock_guard lock(log_mu_);
  return log_;
}

json Session::state_view(int seat) const {
  const auto& r = game_.round();
  const auto& e = game_.episode();
  const Observation obs = game_.observe(seat);
  json last = json::array();
  for (const auto& m : obs.last_moves) last.push_back(group_or_null(m));
  json finished = json::array();
  for (PlayerId p : r.finished) finished.push_back(p);
  const bool live = !over_ && !r.over;
  return {{"type", "state"},
          {"session", id_},
          {"seat", seat},
          {"round", e.round_index},
          {"round_level", rank_name(r.round_level.rank())},
          {"team_levels", levels_json(e.team_levels)},
          {"hand", cards_json(obs.hand)},
          {"remaining", obs.remaining},
          {"turn", live ? json(game_.current_player()) : json(nullptr)},
          {"trick_leader", obs.trick_leader},
          {"current_greatest", group_or_null(obs.to_beat)},
          {"current_greatest_owner", obs.to_beat ? json(obs.to_beat_owner) : json(nullptr)},
          {"partner_last_move", group_or_null(obs.partner_last_move)},
          {"last_moves", last},
          {"finished", finished},
          {"tribute", tribute_json(game_.last_tribute())},
          {"over", over_.load()}};
}

void Session::send(int seat, const json& msg) {
  if (sinks_[seat]) sinks_[seat](msg.dump());
}

void Session::broadcast(const json& msg) {
  const std::string text = msg.dump();
  for (auto& s : sinks_) {
    if (s) s(text);
  }
}

void Session::broadcast_state() {
  for (int s = 0; s < kNumPlayers; ++s) {
    if (sinks_[s]) send(s, state_view(s));
  }
}

void Session::reject(int seat, const std::string& reason) { send(seat, {{"type", "reject"}, {"reason", reason}}); }

void Session::prompt() {
  if (over_) return;
  const PlayerId p = game_.current_player();
  if (config_.seats[p].human) {
    json actions = json::array();
    for (const auto& g : game_.legal_actions()) actions.push_back(g.to_string());
    send(p, {{"type", "legal_actions"}, {"seat", p}, {"actions", actions}});
    return;
  }
  schedule_bot();
}

void Session::schedule_bot() {
  const PlayerId p = game_.current_player();
  const std::uint64_t move = moves_;
  auto obs = std::make_shared<Observation>(game_.observe(p));
  auto legal = std::make_shared<std::vector<CardGroup>>(game_.legal_actions());
  const std::uint64_t bot_seed = rng_();
  auto self = shared_from_this();

  if (bot_timeout_s_ > 0) {
    watchdog_.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(bot_timeout_s_)));
    watchdog_.async_wait([self, p, move, obs, legal](const boost::system::error_code& ec) {
      if (ec || self->moves_ != move || self->over_) return;
      self->bot_timeouts_++;
      std::mt19937_64 rng(move);
      self->apply(p, self->fallback_.act(*obs, *legal, rng));
    });
  }
  asio::post(bot_pool_, [self, p, move, obs, legal, bot_seed] {
    std::mt19937_64 rng(bot_seed);
    CardGroup action;
    try {
      action = self->bots_[p]->act(*obs, *legal, rng);
    } catch (const std::exception&) {
      action = self->fallback_.act(*obs, *legal, rng);
    }
    asio::dispatch(self->strand_, [self, p, move, action] {
      if (self->moves_ != move || self->over_) return;  // the watchdog already moved
      self->watchdog_.cancel();
      const auto& r = self->game_.round();
      if (!check_action(r.hands[p], r.to_beat, r.round_level, action).empty()) {
        auto legal_now = self->game_.legal_actions();
        std::mt19937_64 rng(move);
        self->apply(p, self->fallback_.act(self->game_.observe(p), legal_now, rng));
        return;
      }
      self->apply(p, action);
    });
  });
}

void Session::apply(int seat, const CardGroup& action) {
  StepEvents ev = game_.step(action);
  ++moves_;
  {
    std::lock_guard lock(log_mu_);
    log_.push_back({{"seat", seat}, {"action", action.to_string()}, {"round", game_.episode().round_index}});
  }
  json hands = json::array();
  for (const auto& h : game_.round().hands) hands.push_back(h.size());
  broadcast({{"type", "action"},
             {"seat", seat},
             {"action", action.to_string()},
             {"hands_remaining", hands},
             {"trick_ended", ev.trick_ended},
             {"finished", ev.player_finished ? json(*ev.player_finished) : json(nullptr)}});
  if (game_.round_over()) {
    const int round = game_.episode().round_index;
    RoundSummary s = game_.finish_round();
    json end = {{"type", "round_end"},
                {"round", round},
                {"finish_order", s.finish_order},
                {"rewards", s.rewards},
                {"levels_before", levels_json(s.levels_before)},
                {"levels_after", levels_json(s.levels_after)},
                {"promotion", s.promotion},
                {"next_tribute", s.episode_over ? json(nullptr) : tribute_json(game_.last_tribute())}};
    {
      std::lock_guard lock(log_mu_);
      ++rounds_done_;
      last_round_ = end;
    }
    broadcast(end);
    if (s.episode_over) {
      broadcast({{"type", "episode_end"},
                 {"winning_team", s.winning_team},
                 {"rounds", rounds_done_},
                 {"team_levels", levels_json(s.levels_after)}});
      {
        std::lock_guard lock(log_mu_);
        over_ = true;
      }
      over_cv_.notify_all();
      broadcast_state();
      return;
    }
  }
  broadcast_state();
  prompt();
}

// ---------------------------------------------------------------------------
// Network side.

namespace {

std::string mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

struct Server::Impl {
  ServeOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  asio::thread_pool bot_pool{2};
  std::vector<std::thread> threads;
  BotTable bots;
  std::vector<std::string> bot_names;
  mutable std::mutex mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::uint64_t next_id = 1;
  std::atomic<std::uint64_t> next_token{1};
  bool running = false;

  void do_accept();
  std::shared_ptr<Session> create(const json& body);
  json list() const;
  http::response<http::string_body> handle(const http::request<http::string_body>& req);
};

namespace {

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, Server::Impl& server) : ws_(std::move(socket)), server_(server) {}

  void run(http::request<http::string_body> req) {
    ws_.read_message_max(kMaxMessageBytes);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->read();
    });
  }

  // Thread-safe.
  void send(std::string text) {
    asio::dispatch(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->write();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->on_message(text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  void on_message(const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::exception&) {
      send(json{{"type", "reject"}, {"reason", "message is not valid JSON"}}.dump());
      return;
    }
    if (!msg.is_object()) {
      send(json{{"type", "reject"}, {"reason", "message must be a JSON object"}}.dump());
      return;
    }
    const std::string type = msg.value("type", "");
    if (type == "hello") {
      const std::string id = msg.value("session", "");
      const int seat = msg.value("seat", -1);
      std::shared_ptr<Session> s;
      {
        std::lock_guard lock(server_.mu);
        auto it = server_.sessions.find(id);
        if (it != server_.sessions.end()) s = it->second;
      }
      if (!s) {
        send(json{{"type", "reject"}, {"reason", "unknown session: " + id}}.dump());
        return;
      }
      if (session_) session_->detach(seat_, token_);
      session_ = s;
      seat_ = seat;
      token_ = server_.next_token++;
      std::weak_ptr<WsConnection> weak = shared_from_this();
      s->attach(
          seat,
          [weak](std::string out) {
            if (auto c = weak.lock()) c->send(std::move(out));
          },
          token_);
      return;
    }
    if (!session_) {
      send(json{{"type", "reject"}, {"reason", "send hello first"}}.dump());
      return;
    }
    session_->submit(seat_, std::move(msg));
  }

  void close() {
    if (session_) session_->detach(seat_, token_);
    session_.reset();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::shared_ptr<Session> session_;
  int seat_ = -1;
  std::uint64_t token_ = 0;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Server::Impl& server) : stream_(std::move(socket)), server_(server) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (websocket::is_upgrade(self->req_)) {
        if (self->req_.target() == "/ws" || self->req_.target().starts_with("/ws?")) {
          stream_release(self);
          return;
        }
      }
      auto res = std::make_shared<http::response<http::string_body>>(self->server_.handle(self->req_));
      http::async_write(self->stream_, *res, [self, res](beast::error_code ec2, std::size_t) {
        if (ec2 || !res->keep_alive()) {
          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec2);
          return;
        }
        self->read();
      });
    });
  }

  static void stream_release(const std::shared_ptr<HttpConnection>& self) {
    self->stream_.expires_never();
    auto ws = std::make_shared<WsConnection>(self->stream_.release_socket(), self->server_);
    ws->run(std::move(self->req_));
  }

  beast::tcp_stream stream_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::do_accept() {
  acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpConnection>(std::move(socket), *this)->run();
    do_accept();
  });
}

std::shared_ptr<Session> Server::Impl::create(const json& body) {
  SessionConfig cfg = parse_session_config(body, bot_names);
  std::string id;
  {
    std::lock_guard lock(mu);
    id = "s" + std::to_string(next_id++);
  }
  auto s = std::make_shared<Session>(id, cfg, bots, ioc.get_executor(), bot_pool, options.bot_timeout_s);
  {
    std::lock_guard lock(mu);
    sessions[id] = s;
  }
  s->start();
  return s;
}

json Server::Impl::list() const {
  std::lock_guard lock(mu);
  json out = json::array();
  for (const auto& [id, s] : sessions) out.push_back(s->summary());
  return out;
}

http::response<http::string_body> Server::Impl::handle(const http::request<http::string_body>& req) {
  auto reply = [&](http::status status, const std::string& body, const std::string& type = "application/json") {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::content_type, type);
    res.keep_alive(req.keep_alive());
    res.body() = body;
    res.prepare_payload();
    return res;
  };
  auto error = [&](http::status status, const std::string& what) {
    return reply(status, json{{"error", what}}.dump() + "\n");
  };
  const std::string target(req.target());
  const std::string path = target.substr(0, target.find('?'));
  if (path == "/healthz" && req.method() == http::verb::get) {
    std::lock_guard lock(mu);
    return reply(http::status::ok, json{{"ok", true}, {"sessions", sessions.size()}}.dump() + "\n");
  }
  if (path == "/sessions") {
    if (req.method() == http::verb::get) return reply(http::status::ok, list().dump() + "\n");
    if (req.method() == http::verb::post) {
      try {
        auto s = create(json::parse(req.body()));
        return reply(http::status::created, json{{"session", s->id()}}.dump() + "\n");
      } catch (const json::exception& e) {
        return error(http::status::bad_request, std::string("bad JSON: ") + e.what());
      } catch (const GuandanError& e) {
        return error(http::status::bad_request, e.what());
      }
    }
    return error(http::status::method_not_allowed, "use GET or POST");
  }
  if (path.starts_with("/sessions/") && req.method() == http::verb::get) {
    std::shared_ptr<Session> s;
    {
      std::lock_guard lock(mu);
      auto it = sessions.find(path.substr(10));
      if (it != sessions.end()) s = it->second;
    }
    if (!s) return error(http::status::not_found, "unknown session");
    json body = s->summary();
    body["moves"] = s->move_log();
    return reply(http::status::ok, body.dump() + "\n");
  }
  if (!options.static_dir.empty() && req.method() == http::verb::get && path.find("..") == std::string::npos) {
    std::filesystem::path file = std::filesystem::path(options.static_dir) / (path == "/" ? "index.html" : path.substr(1));
    std::error_code ec;
    if (std::filesystem::is_regular_file(file, ec)) {
      try {
        return reply(http::status::ok, read_file(file.string()), mime_type(file));
      } catch (const GuandanError&) {
      }
    }
  }
  return error(http::status::not_found, "not found");
}

Server::Server(ServeOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  auto heuristic = std::make_shared<HeuristicPolicy>();
  impl_->bots["heuristic"] = heuristic;
  impl_->bots["random"] = std::make_shared<RandomPolicy>();
  if (!impl_->options.checkpoint.empty()) {
    auto net = std::make_shared<const QNet>(load_checkpoint(impl_->options.checkpoint));
    impl_->bots["greedy"] = std::make_shared<GreedyPolicy>(net, "greedy");
    impl_->bots["bot"] = impl_->bots["greedy"];
  } else {
    impl_->bots["bot"] = heuristic;
  }
  for (const auto& [name, p] : impl_->bots) impl_->bot_names.push_back(name);
}

Server::~Server() { stop(); }

int Server::start() {
  auto& im = *impl_;
  tcp::endpoint ep(asio::ip::make_address(im.options.host), static_cast<unsigned short>(im.options.port));
  im.acceptor.open(ep.protocol());
  im.acceptor.set_option(asio::socket_base::reuse_address(true));
  im.acceptor.bind(ep);
  im.acceptor.listen();
  im.do_accept();
  im.running = true;
  for (int i = 0; i < std::max(1, im.options.threads); ++i) im.threads.emplace_back([&im] { im.ioc.run(); });
  return im.acceptor.local_endpoint().port();
}

void Server::stop() {
  auto& im = *impl_;
  if (!im.running) return;
  im.running = false;
  asio::post(im.ioc, [&im] {
    beast::error_code ec;
    im.acceptor.close(ec);
  });
  im.ioc.stop();
  for (auto& t : im.threads) t.join();
  im.threads.clear();
  im.bot_pool.join();
}

std::shared_ptr<Session> Server::find(const std::string& id) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->sessions.find(id);
  return it == impl_->sessions.end() ? nullptr : it->second;
}

std::shared_ptr<Session> Server::create(const json& body) { return impl_->create(body); }

json Server::list() const { return impl_->list(); }

int run_server(const ServeOptions& options) {
  Server server(options);
  const int port = server.start();
  std::printf("serving on http://%s:%d (ws at /ws)\n", options.host.c_str(), port);
  std::fflush(stdout);
  asio::io_context signals_ctx;
  asio::signal_set signals(signals_ctx, SIGINT, SIGTERM);
  signals.async_wait([](const boost::system::error_code&, int) {});
  signals_ctx.run();
  server.stop();
  return 0;
}

}  // namespace guandan
