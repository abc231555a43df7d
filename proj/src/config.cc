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

#include "guandan/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "guandan/binio.h"
#include "guandan/features.h"

namespace guandan {
namespace {

namespace pt = boost::property_tree;

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad value for " + key + ": '" + text + "'");
  return value;
}

template <typename T>
std::string format_number(T value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<int> parse_widths(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty entry in " + key);
    out.push_back(parse_number<int>(key, item.substr(b, e - b + 1)));
  }
  return out;
}

struct Field {
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <typename T>
Field number(T TrainConfig::*member, const std::string& key) {
  return {[member, key](TrainConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); },
          [member](const TrainConfig& c) { return format_number(c.*member); }};
}

// Section-qualified key -> accessor, in file order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"run.seed", number(&TrainConfig::seed, "run.seed")},
      {"run.out_dir",
       {[](TrainConfig& c, const std::string& v) { c.out_dir = v; }, [](const TrainConfig& c) { return c.out_dir; }}},
      {"run.actors", number(&TrainConfig::actors, "run.actors")},
      {"run.max_minutes", number(&TrainConfig::max_minutes, "run.max_minutes")},
      {"run.max_transitions", number(&TrainConfig::max_transitions, "run.max_transitions")},
      {"actor.epsilon", number(&TrainConfig::epsilon, "actor.epsilon")},
      {"actor.sync_period", number(&TrainConfig::sync_period, "actor.sync_period")},
      {"actor.max_rounds", number(&TrainConfig::max_rounds, "actor.max_rounds")},
      {"learner.lambda", number(&TrainConfig::lambda, "learner.lambda")},
      {"learner.batch", number(&TrainConfig::batch, "learner.batch")},
      {"learner.capacity", number(&TrainConfig::capacity, "learner.capacity")},
      {"learner.lr", number(&TrainConfig::lr, "learner.lr")},
      {"learner.optimizer",
       {[](TrainConfig& c, const std::string& v) { c.optimizer = v; },
        [](const TrainConfig& c) { return c.optimizer; }}},
      {"learner.steps", number(&TrainConfig::steps, "learner.steps")},
      {"learner.warmup", number(&TrainConfig::warmup, "learner.warmup")},
      {"learner.max_replay_ratio", number(&TrainConfig::max_replay_ratio, "learner.max_replay_ratio")},
      {"learner.publish_every", number(&TrainConfig::publish_every, "learner.publish_every")},
      {"learner.checkpoint_every", number(&TrainConfig::checkpoint_every, "learner.checkpoint_every")},
      {"learner.metrics_every", number(&TrainConfig::metrics_every, "learner.metrics_every")},
      {"net.hidden",
       {[](TrainConfig& c, const std::string& v) { c.hidden = parse_widths("net.hidden", v); },
        [](const TrainConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.hidden.size(); ++i) s += (i ? "," : "") + std::to_string(c.hidden[i]);
          return s;
        }}},
  };
  return table;
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (actors < 1) fail("run.actors must be at least 1");
  if (out_dir.empty()) fail("run.out_dir must not be empty");
  if (max_minutes < 0 || !std::isfinite(max_minutes)) fail("run.max_minutes must be >= 0");
  if (max_transitions < 0) fail("run.max_transitions must be >= 0");
  if (!(epsilon >= 0 && epsilon <= 1)) fail("actor.epsilon must be in [0, 1]");
  if (sync_period < 1) fail("actor.sync_period must be at least 1");
  if (max_rounds < 1) fail("actor.max_rounds must be at least 1");
  if (!(lambda > 0)) fail("learner.lambda must be > 0");
  if (batch < 1) fail("learner.batch must be at least 1");
  if (capacity < batch) fail("learner.capacity must hold at least one batch");
  if (!(lr > 0) || !std::isfinite(lr)) fail("learner.lr must be > 0");
  if (optimizer != "sgd" && optimizer != "adam") fail("learner.optimizer must be sgd or adam");
  if (steps < 0) fail("learner.steps must be >= 0");
  if (warmup < 0) fail("learner.warmup must be >= 0");
  if (max_replay_ratio < 0) fail("learner.max_replay_ratio must be >= 0");
  if (publish_every < 1) fail("learner.publish_every must be at least 1");
  if (checkpoint_every < 1) fail("learner.checkpoint_every must be at least 1");
  if (metrics_every < 1) fail("learner.metrics_every must be at least 1");
  if (hidden.empty()) fail("net.hidden must list at least one width");
  for (int w : hidden) {
    if (w < 1 || w > 8192) fail("net.hidden widths must be in 1..8192");
  }
}

std::vector<int> TrainConfig::widths() const {
  std::vector<int> w{kInputDim};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  return w;
}

TrainConfig parse_train_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  std::map<std::string, const Field*> by_key;
  for (const auto& [key, field] : fields()) by_key[key] = &field;
  TrainConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key outside a section: " + section);
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      auto it = by_key.find(full);
      if (it == by_key.end()) throw ConfigError("unknown config key: " + full);
      it->second->set(c, value.get_value<std::string>());
    }
  }
  return c;
}

TrainConfig load_train_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const GuandanError& e) {
    throw ConfigError(e.what());
  }
  return parse_train_config(text);
}

std::string format_train_config(const TrainConfig& config) {
  std::string out;
  std::string section;
  for (const auto& [key, field] : fields()) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "" : "\n") + ("[" + sec + "]\n");
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + field.get(config) + "\n";
  }
  return out;
}

}  // namespace guandan
