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

#include "guandan/wire.h"

#include <sys/socket.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>

#include "guandan/binio.h"

namespace guandan {
namespace {

std::uint32_t crc_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

void send_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    ssize_t k = ::send(fd, data, n, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw GuandanError(std::string("socket write failed: ") + std::strerror(errno));
    }
    data += k;
    n -= static_cast<std::size_t>(k);
  }
}

// Returns bytes read before EOF.
std::size_t recv_all(int fd, char* data, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    ssize_t k = ::recv(fd, data + got, n - got, 0);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw GuandanError(std::string("socket read failed: ") + std::strerror(errno));
    }
    if (k == 0) break;
    got += static_cast<std::size_t>(k);
  }
  return got;
}

bool known_kind(std::uint8_t k) { return k >= 1 && k <= 4; }

}  // namespace

std::string encode_frame(FrameKind kind, std::string_view payload) {
  if (payload.size() + 1 > kMaxFrameBytes) throw GuandanError("frame too large");
  ByteWriter w;
  w.put(static_cast<std::uint32_t>(payload.size() + 1));
  w.put(static_cast<std::uint8_t>(kind));
  w.put_bytes(payload);
  return std::move(w.str());
}

void write_frame(int fd, FrameKind kind, std::string_view payload) {
  std::string bytes = encode_frame(kind, payload);
  send_all(fd, bytes.data(), bytes.size());
}

std::optional<Frame> read_frame(int fd) {
  char header[5];
  std::size_t got = recv_all(fd, header, sizeof(header));
  if (got == 0) return std::nullopt;
  if (got < sizeof(header)) throw FormatError("connection closed inside a frame header", got);
  std::uint32_t len;
  std::memcpy(&len, header, 4);
  const auto kind = static_cast<std::uint8_t>(header[4]);
  if (len == 0 || len > kMaxFrameBytes) throw FormatError("bad frame length " + std::to_string(len), 0);
  if (!known_kind(kind)) throw FormatError("unknown frame kind " + std::to_string(kind), 4);
  Frame f{static_cast<FrameKind>(kind), std::string(len - 1, '\0')};
  got = recv_all(fd, f.payload.data(), f.payload.size());
  if (got < f.payload.size()) throw FormatError("connection closed inside a frame", 5 + got);
  return f;
}

std::string encode_trajectory(const TrajectoryBatch& batch) {
  ByteWriter w;
  w.put(batch.actor_id);
  w.put(batch.sequence);
  w.put(batch.episode_seed);
  w.put(static_cast<std::uint32_t>(batch.transitions.size()));
  for (const auto& t : batch.transitions) {
    w.put_span(std::span<const std::int8_t>(t.state));
    w.put_span(std::span<const std::int8_t>(t.action));
    w.put(t.q_actor);
    w.put(t.reward);
    w.put(t.param_version);
    w.put(t.player);
    w.put(t.round);
  }
  w.put(crc_of(w.str()));
  return std::move(w.str());
}

TrajectoryBatch decode_trajectory(std::string_view payload) {
  if (payload.size() < 4) throw FormatError("trajectory payload too short", 0);
  const std::size_t body = payload.size() - 4;
  std::uint32_t crc;
  std::memcpy(&crc, payload.data() + body, 4);
  if (crc != crc_of(payload.substr(0, body))) throw FormatError("trajectory checksum mismatch", body);
  ByteReader r(payload.substr(0, body));
  TrajectoryBatch b;
  b.actor_id = r.get<std::uint32_t>();
  b.sequence = r.get<std::uint64_t>();
  b.episode_seed = r.get<std::uint64_t>();
  const auto count = r.get<std::uint32_t>();
  if (count != r.remaining() / kPackedTransitionBytes || r.remaining() % kPackedTransitionBytes != 0) {
    r.fail("transition count does not match payload size");
  }
  b.transitions.resize(count);
  for (auto& t : b.transitions) {
    r.get_span(std::span<std::int8_t>(t.state));
    r.get_span(std::span<std::int8_t>(t.action));
    t.q_actor = r.get<float>();
    t.reward = r.get<float>();
    t.param_version = r.get<std::uint64_t>();
    t.player = r.get<std::uint8_t>();
    t.round = r.get<std::uint16_t>();
  }
  return b;
}

std::string encode_hello(const Hello& h) {
  ByteWriter w;
  w.put(h.actor_id);
  w.put(h.have_version);
  return std::move(w.str());
}

Hello decode_hello(std::string_view payload) {
  ByteReader r(payload);
  Hello h;
  h.actor_id = r.get<std::uint32_t>();
  h.have_version = r.get<std::uint64_t>();
  if (!r.done()) r.fail("trailing bytes in hello");
  return h;
}

std::string encode_params(const ParamsMessage& m) {
  ByteWriter w;
  w.put(static_cast<std::uint8_t>(m.stop ? 1 : 0));
  w.put(m.version);
  w.put_bytes(m.checkpoint);
  return std::move(w.str());
}

ParamsMessage decode_params(std::string_view payload) {
  ByteReader r(payload);
  ParamsMessage m;
  const auto flags = r.get<std::uint8_t>();
  if (flags > 1) r.fail("unknown params flags");
  m.stop = flags & 1;
  m.version = r.get<std::uint64_t>();
  m.checkpoint = std::string(r.get_bytes(r.remaining()));
  return m;
}

}  // namespace guandan
