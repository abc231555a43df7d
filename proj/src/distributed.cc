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

#include "guandan/distributed.h"

#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "guandan/binio.h"
#include "guandan/training.h"
#include "guandan/wire.h"
#include "json.hpp"

extern char** environ;

namespace guandan {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using json = nlohmann::json;

std::atomic<bool> g_stop_requested{false};

void on_stop_signal(int) { g_stop_requested = true; }

class SignalScope {
 public:
  SignalScope() {
    g_stop_requested = false;
    struct sigaction sa {};
    sa.sa_handler = on_stop_signal;
    sigemptyset(&sa.sa_mask);
    sigaction(SIGINT, &sa, &old_int_);
    sigaction(SIGTERM, &sa, &old_term_);
  }
  ~SignalScope() {
    sigaction(SIGINT, &old_int_, nullptr);
    sigaction(SIGTERM, &old_term_, nullptr);
  }

 private:
  struct sigaction old_int_ {};
  struct sigaction old_term_ {};
};

// Multi-producer single-consumer queue; producers block while it is full.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(T item) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_; });
    items_.push_back(std::move(item));
    not_empty_.notify_one();
  }

  std::vector<T> drain(std::chrono::milliseconds wait) {
    std::unique_lock lock(mu_);
    if (items_.empty() && wait.count() > 0) not_empty_.wait_for(lock, wait, [&] { return !items_.empty(); });
    std::vector<T> out(std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
    items_.clear();
    not_full_.notify_all();
    return out;
  }

 private:
  const std::size_t capacity_;
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> items_;
};

sockaddr_un socket_address(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) throw GuandanError("socket path too long: " + path);
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  return addr;
}

std::string choose_socket_path(const fs::path& out_dir) {
  std::string p = fs::absolute(out_dir / "learner.sock").string();
  if (p.size() < sizeof(sockaddr_un::sun_path)) return p;
  return "/tmp/guandan-learner-" + std::to_string(::getpid()) + ".sock";
}

std::string checkpoint_name(std::int64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step_%09lld.gdqn", static_cast<long long>(step));
  return buf;
}

class Learner {
 public:
  Learner(const TrainConfig& config, std::string exe) : cfg_(config), exe_(std::move(exe)), queue_(64) {}

  TrainSummary run();

 private:
  struct ActorState {
    ActorReport report;
    bool seen_frame = false;
    std::uint64_t next_sequence = 0;
    std::uint64_t last_version = 0;
    bool has_version = false;
  };

  void publish(const QNet& net);
  void spawn_actors(const std::string& socket_path);
  void accept_loop();
  void serve(int fd);
  void ingest(TrajectoryBatch&& batch);
  void write_checkpoint(const QNet& net);
  void reap_actors(bool block_until_all, double timeout_s);
  int live_actors();

  const TrainConfig cfg_;
  const std::string exe_;
  fs::path dir_;
  Clock::time_point start_;

  std::mutex snap_mu_;
  std::shared_ptr<const std::string> snapshot_;
  std::uint64_t snapshot_version_ = 0;
  std::set<std::uint64_t> published_;
  std::atomic<bool> stopping_{false};

  BoundedQueue<TrajectoryBatch> queue_;
  ReplayBuffer* buffer_ = nullptr;

  std::mutex actors_mu_;
  std::map<std::uint32_t, ActorState> actors_;
  std::map<pid_t, std::uint32_t> pids_;

  std::atomic<std::uint64_t> corrupt_frames_{0};
  std::atomic<std::uint64_t> frames_{0};
  int listen_fd_ = -1;
  std::mutex conn_mu_;
  std::vector<std::thread> conn_threads_;
  std::vector<int> conn_fds_;

  TrainSummary summary_;
  std::ofstream index_;
  std::int64_t steps_ = 0;
  std::uint64_t episodes_ = 0;
};

void Learner::publish(const QNet& net) {
  auto bytes = std::make_shared<const std::string>(serialize(net));
  std::lock_guard lock(snap_mu_);
  snapshot_ = std::move(bytes);
  snapshot_version_ = net.version();
  published_.insert(net.version());
}

void Learner::spawn_actors(const std::string& socket_path) {
  for (int i = 0; i < cfg_.actors; ++i) {
    const std::uint64_t seed = cfg_.seed * 1000003ull + static_cast<std::uint64_t>(i) + 1;
    std::vector<std::string> args = {exe_,
                                     "actor",
                                     "--socket",
                                     socket_path,
                                     "--id",
                                     std::to_string(i),
                                     "--seed",
                                     std::to_string(seed),
                                     "--epsilon",
                                     std::to_string(cfg_.epsilon),
                                     "--sync-period",
                                     std::to_string(cfg_.sync_period),
                                     "--max-rounds",
                                     std::to_string(cfg_.max_rounds)};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid;
    int rc = posix_spawn(&pid, exe_.c_str(), nullptr, nullptr, argv.data(), environ);
    if (rc != 0) throw GuandanError("cannot start actor process " + exe_ + ": " + std::strerror(rc));
    std::lock_guard lock(actors_mu_);
    pids_[pid] = static_cast<std::uint32_t>(i);
    actors_[static_cast<std::uint32_t>(i)].report.id = static_cast<std::uint32_t>(i);
  }
}

void Learner::accept_loop() {
  while (true) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;  // listening socket shut down
    }
    std::lock_guard lock(conn_mu_);
    conn_fds_.push_back(fd);
    conn_threads_.emplace_back([this, fd] { serve(fd); });
  }
}

void Learner::serve(int fd) {
  try {
    while (auto frame = read_frame(fd)) {
      frames_++;
      switch (frame->kind) {
        case FrameKind::kHello: {
          Hello h = decode_hello(frame->payload);
          ParamsMessage m;
          {
            std::lock_guard lock(snap_mu_);
            m.version = snapshot_version_;
            m.stop = stopping_;
            if (h.have_version == UINT64_MAX || h.have_version < snapshot_version_) m.checkpoint = *snapshot_;
          }
          write_frame(fd, FrameKind::kParams, encode_params(m));
          break;
        }
        case FrameKind::kTrajectory: {
          try {
            queue_.push(decode_trajectory(frame->payload));
          } catch (const FormatError&) {
            corrupt_frames_++;
          }
          break;
        }
        case FrameKind::kStats: {
          auto j = json::parse(frame->payload);
          std::lock_guard lock(actors_mu_);
          auto& r = actors_[j.at("actor").get<std::uint32_t>()].report;
          r.episodes = j.at("episodes");
          r.transitions = j.at("transitions");
          r.failed_episodes = j.at("failed_episodes");
          r.first_version = j.at("first_version");
          r.last_version = j.at("last_version");
          r.versions_monotone = j.at("monotone");
          r.reported = true;
          break;
        }
        case FrameKind::kParams:
          corrupt_frames_++;  // never sent by actors
          break;
      }
    }
  } catch (const FormatError&) {
    corrupt_frames_++;
  } catch (const std::exception&) {
    // Peer vanished; the reaper records how the process ended.
  }
  ::close(fd);
}

void Learner::ingest(TrajectoryBatch&& batch) {
  std::set<std::uint64_t> published;
  {
    std::lock_guard lock(snap_mu_);
    published = published_;
  }
  std::lock_guard lock(actors_mu_);
  auto& a = actors_[batch.actor_id];
  if (a.seen_frame && batch.sequence != a.next_sequence) summary_.sequence_gaps++;
  a.seen_frame = true;
  a.next_sequence = batch.sequence + 1;
  for (const auto& t : batch.transitions) {
    if (!published.count(t.param_version)) summary_.unknown_versions++;
    if (a.has_version && t.param_version < a.last_version) summary_.nonmonotone_versions++;
    a.has_version = true;
    a.last_version = t.param_version;
    const float r = t.reward;
    if (t.player >= kNumPlayers || r != std::round(r) || std::abs(r) > 3) summary_.bad_transitions++;
  }
  summary_.transitions += batch.transitions.size();
  episodes_++;
  buffer_->push(batch.transitions);
}

void Learner::write_checkpoint(const QNet& net) {
  const std::string name = checkpoint_name(steps_);
  save_checkpoint((dir_ / "checkpoints" / name).string(), net);
  const double elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
  index_ << name << "," << steps_ << "," << net.version() << "," << elapsed << "," << summary_.transitions << ","
         << episodes_ << "\n";
  index_.flush();
  summary_.checkpoints.push_back(name);
}

int Learner::live_actors() {
  std::lock_guard lock(actors_mu_);
  return static_cast<int>(pids_.size());
}

void Learner::reap_actors(bool block_until_all, double timeout_s) {
  const auto deadline = Clock::now() + std::chrono::duration<double>(timeout_s);
  bool killed = false;
  while (true) {
    {
      std::lock_guard lock(actors_mu_);
      for (auto it = pids_.begin(); it != pids_.end();) {
        int status = 0;
        pid_t r = ::waitpid(it->first, &status, WNOHANG);
        if (r == it->first) {
          actors_[it->second].report.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
          it = pids_.erase(it);
        } else {
          ++it;
        }
      }
      if (!block_until_all || pids_.empty()) return;
      if (Clock::now() > deadline && !killed) {
        for (auto& [pid, id] : pids_) ::kill(pid, SIGTERM);
        killed = true;
      }
    }
    // Keep readers unblocked while actors finish their last episode.
    for (auto& b : queue_.drain(std::chrono::milliseconds(50))) ingest(std::move(b));
  }
}

TrainSummary Learner::run() {
  cfg_.validate();
  start_ = Clock::now();
  dir_ = cfg_.out_dir;
  fs::create_directories(dir_ / "checkpoints");
  index_.open(dir_ / "checkpoints" / "index.csv", std::ios::trunc);
  index_ << "file,step,version,elapsed_s,transitions,episodes\n";
  std::ofstream metrics(dir_ / "metrics.jsonl", std::ios::trunc);
  if (!index_ || !metrics) throw GuandanError("cannot write to " + dir_.string());
  {
    std::ofstream(dir_ / "config.ini") << format_train_config(cfg_);
  }

  SignalScope signals;
  ReplayBuffer buffer(static_cast<std::size_t>(cfg_.capacity));
  buffer_ = &buffer;
  QNet net(cfg_.widths());
  net.init_he_uniform(cfg_.seed);
  publish(net);
  auto opt = make_optimizer(cfg_.optimizer, static_cast<float>(cfg_.lr));
  std::mt19937_64 rng(cfg_.seed ^ 0x9e3779b97f4a7c15ull);

  const std::string socket_path = choose_socket_path(dir_);
  ::unlink(socket_path.c_str());
  listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  auto addr = socket_address(socket_path);
  if (listen_fd_ < 0 || ::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, cfg_.actors + 4) != 0) {
    throw GuandanError("cannot listen on " + socket_path + ": " + std::strerror(errno));
  }
  std::thread acceptor([this] { accept_loop(); });
  spawn_actors(socket_path);

  const std::size_t warmup = static_cast<std::size_t>(std::max<std::int64_t>(cfg_.warmup, cfg_.batch));
  double loss_sum = 0, clip_sum = 0;
  int loss_count = 0;
  while (true) {
    if (g_stop_requested) {
      summary_.interrupted = true;
      break;
    }
    if (cfg_.steps > 0 && steps_ >= cfg_.steps) break;
    if (cfg_.max_minutes > 0 && Clock::now() - start_ > std::chrono::duration<double>(cfg_.max_minutes * 60)) break;
    if (cfg_.max_transitions > 0 && summary_.transitions >= static_cast<std::uint64_t>(cfg_.max_transitions)) break;
    reap_actors(false, 0);
    if (live_actors() == 0) {
      summary_.fault = "all actor processes exited";
      break;
    }

    const bool enough = buffer.size() >= warmup;
    const bool ratio_ok = cfg_.max_replay_ratio <= 0 ||
                          static_cast<double>(steps_ + 1) * cfg_.batch <= cfg_.max_replay_ratio * summary_.transitions;
    const bool can_train = enough && ratio_ok;
    for (auto& b : queue_.drain(std::chrono::milliseconds(can_train ? 0 : 50))) ingest(std::move(b));
    if (!can_train) continue;

    auto stats = learner_step(buffer, net, *opt, cfg_.batch, cfg_.lambda, rng);
    ++steps_;
    loss_sum += stats.loss;
    clip_sum += stats.clipped_fraction;
    ++loss_count;
    if (steps_ % cfg_.publish_every == 0) publish(net);
    if (steps_ % cfg_.metrics_every == 0) {
      json line = {{"step", steps_},
                   {"loss", loss_sum / loss_count},
                   {"clipped_fraction", clip_sum / loss_count},
                   {"buffer_size", buffer.size()},
                   {"episodes", episodes_},
                   {"transitions", summary_.transitions},
                   {"version", net.version()},
                   {"elapsed_s", std::chrono::duration<double>(Clock::now() - start_).count()}};
      metrics << line.dump() << "\n";
      metrics.flush();
      loss_sum = clip_sum = 0;
      loss_count = 0;
    }
    if (steps_ % cfg_.checkpoint_every == 0) write_checkpoint(net);
  }

  // Shutdown: publish the final version with the stop flag so every actor
  // picks it up on its next HELLO and leaves.
  publish(net);
  stopping_ = true;
  reap_actors(true, 600);
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  acceptor.join();
  {
    std::lock_guard lock(conn_mu_);
    for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : conn_threads_) t.join();
  for (auto& b : queue_.drain(std::chrono::milliseconds(0))) ingest(std::move(b));
  ::unlink(socket_path.c_str());

  if (summary_.checkpoints.empty() || summary_.checkpoints.back() != checkpoint_name(steps_)) write_checkpoint(net);

  summary_.steps = steps_;
  summary_.final_version = net.version();
  summary_.episodes = episodes_;
  summary_.frames = frames_;
  summary_.corrupt_frames += corrupt_frames_;
  summary_.published_versions = published_.size();
  summary_.elapsed_s = std::chrono::duration<double>(Clock::now() - start_).count();
  summary_.actors_converged = true;
  for (auto& [id, a] : actors_) {
    summary_.actors.push_back(a.report);
    if (!a.report.reported || a.report.last_version != summary_.final_version) summary_.actors_converged = false;
    if (!a.report.versions_monotone) summary_.nonmonotone_versions++;
  }

  json actors = json::array();
  for (const auto& a : summary_.actors) {
    actors.push_back({{"id", a.id},
                      {"episodes", a.episodes},
                      {"transitions", a.transitions},
                      {"failed_episodes", a.failed_episodes},
                      {"first_version", a.first_version},
                      {"last_version", a.last_version},
                      {"versions_monotone", a.versions_monotone},
                      {"reported", a.reported},
                      {"exit_code", a.exit_code}});
  }
  json out = {{"steps", summary_.steps},
              {"final_version", summary_.final_version},
              {"transitions", summary_.transitions},
              {"episodes", summary_.episodes},
              {"frames", summary_.frames},
              {"corrupt_frames", summary_.corrupt_frames},
              {"sequence_gaps", summary_.sequence_gaps},
              {"unknown_versions", summary_.unknown_versions},
              {"nonmonotone_versions", summary_.nonmonotone_versions},
              {"bad_transitions", summary_.bad_transitions},
              {"published_versions", summary_.published_versions},
              {"actors_converged", summary_.actors_converged},
              {"interrupted", summary_.interrupted},
              {"fault", summary_.fault},
              {"elapsed_s", summary_.elapsed_s},
              {"integrity_ok", summary_.integrity_ok()},
              {"actors", actors},
              {"checkpoints", summary_.checkpoints}};
  write_file((dir_ / "summary.json").string(), out.dump(2) + "\n");
  return summary_;
}

int connect_to(const std::string& path, double timeout_s) {
  const auto deadline = Clock::now() + std::chrono::duration<double>(timeout_s);
  auto addr = socket_address(path);
  while (true) {
    int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd >= 0 && ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) return fd;
    if (fd >= 0) ::close(fd);
    if (Clock::now() > deadline) return -1;
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

}  // namespace

bool TrainSummary::integrity_ok() const {
  return corrupt_frames == 0 && sequence_gaps == 0 && unknown_versions == 0 && nonmonotone_versions == 0 &&
         bad_transitions == 0 && fault.empty();
}

TrainSummary run_learner(const TrainConfig& config, const std::string& actor_executable) {
  Learner learner(config, actor_executable);
  return learner.run();
}

int run_actor_process(const ActorProcessOptions& options) {
  // The learner owns shutdown; a stray terminal ctrl-c must not kill actors mid-frame.
  ::signal(SIGINT, SIG_IGN);
  int fd = connect_to(options.socket_path, 30);
  if (fd < 0) {
    std::fprintf(stderr, "actor %u: cannot connect to %s\n", options.id, options.socket_path.c_str());
    return 2;
  }
  std::mt19937_64 rng(options.seed);
  ActorOptions play;
  play.epsilon = options.epsilon;
  play.max_rounds = options.max_rounds;
  std::unique_ptr<QNet> net;
  std::uint64_t first_version = 0, last_version = 0, transitions = 0, failed = 0, sequence = 0;
  bool monotone = true;
  std::int64_t episodes = 0;

  // Resends a frame once after reconnecting if the learner connection drops.
  auto send = [&](FrameKind kind, const std::string& payload) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        write_frame(fd, kind, payload);
        return true;
      } catch (const GuandanError&) {
        ::close(fd);
        fd = connect_to(options.socket_path, 10);
        if (fd < 0) return false;
      }
    }
    return false;
  };

  try {
    while (true) {
      if (!net || episodes % options.sync_period == 0) {
        if (!send(FrameKind::kHello, encode_hello({options.id, net ? net->version() : UINT64_MAX}))) break;
        auto reply = read_frame(fd);
        if (!reply || reply->kind != FrameKind::kParams) break;
        auto m = decode_params(reply->payload);
        if (!m.checkpoint.empty()) {
          auto fresh = std::make_unique<QNet>(deserialize(m.checkpoint));
          if (net && fresh->version() < net->version()) monotone = false;
          if (!net) first_version = fresh->version();
          net = std::move(fresh);
          last_version = net->version();
        }
        if (m.stop) break;
      }
      auto rec = run_actor_episode(rng(), *net, play, rng);
      if (!rec.completed) {
        ++failed;
        std::fprintf(stderr, "actor %u: episode %llu aborted: %s\n", options.id,
                     static_cast<unsigned long long>(rec.seed), rec.error.c_str());
      }
      TrajectoryBatch batch;
      batch.actor_id = options.id;
      batch.sequence = sequence++;
      batch.episode_seed = rec.seed;
      for (auto& traj : rec.trajectories) batch.transitions.insert(batch.transitions.end(), traj.begin(), traj.end());
      transitions += batch.transitions.size();
      if (!send(FrameKind::kTrajectory, encode_trajectory(batch))) break;
      ++episodes;
      if (options.max_episodes > 0 && episodes >= options.max_episodes) break;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "actor %u: %s\n", options.id, e.what());
    if (fd >= 0) ::close(fd);
    return 2;
  }
  json stats = {{"actor", options.id},         {"episodes", episodes}, {"transitions", transitions},
                {"failed_episodes", failed},   {"first_version", first_version},
                {"last_version", last_version}, {"monotone", monotone}};
  send(FrameKind::kStats, stats.dump());
  if (fd >= 0) ::close(fd);
  return 0;
}

}  // namespace guandan
