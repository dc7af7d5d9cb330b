// Copyright 2026 The ppsgcn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ppsgcn/config.h"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>

#include "ppsgcn/error.h"

namespace ppsgcn::config {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool IsBareKey(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      return false;
  return true;
}

// Parses a basic string starting at s[0] == '"'; returns the index after the
// closing quote.
std::size_t ParseQuoted(const std::string& s, std::string& out, const std::string& source,
                        std::size_t line) {
  out.clear();
  for (std::size_t i = 1; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') return i + 1;
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (++i >= s.size()) break;
    switch (s[i]) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      default: throw ParseError(source, line, "unsupported escape in string");
    }
  }
  throw ParseError(source, line, "unterminated string");
}

std::string StripComment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && in_string) {
      ++i;
    } else if (s[i] == '"') {
      in_string = !in_string;
    } else if (s[i] == '#' && !in_string) {
      return s.substr(0, i);
    }
  }
  return s;
}

std::int64_t ToInt(const std::string& key, const std::string& v) {
  std::string digits;
  for (char c : v)
    if (c != '_') digits.push_back(c);
  std::int64_t out = 0;
  const char* begin = digits.data() + (!digits.empty() && digits[0] == '+');
  const auto [p, ec] = std::from_chars(begin, digits.data() + digits.size(), out);
  if (ec != std::errc() || p != digits.data() + digits.size() || digits.empty())
    throw ValidationError(key + ": expected an integer, got '" + v + "'");
  return out;
}

int ToInt32(const std::string& key, const std::string& v) {
  const std::int64_t x = ToInt(key, v);
  if (x < INT32_MIN || x > INT32_MAX) throw RangeError(key + ": value out of range");
  return static_cast<int>(x);
}

std::uint64_t ToSeed(const std::string& key, const std::string& v) {
  const std::int64_t x = ToInt(key, v);
  if (x < 0) throw RangeError(key + ": seeds are non-negative");
  return static_cast<std::uint64_t>(x);
}

double ToDouble(const std::string& key, const std::string& v) {
  std::string t;
  for (char c : v)
    if (c != '_') t.push_back(c);
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(x))
    throw ValidationError(key + ": expected a number, got '" + v + "'");
  return x;
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ValidationError(key + ": expected true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    // [data]
    t["data.nodes"] = [](RunConfig& c, const std::string& v) { c.data.nodes = v; };
    t["data.edges"] = [](RunConfig& c, const std::string& v) { c.data.edges = v; };
    t["data.masks"] = [](RunConfig& c, const std::string& v) { c.data.masks = v; };
    t["data.partition"] = [](RunConfig& c, const std::string& v) { c.data.partition = v; };
    t["data.train_fraction"] = [](RunConfig& c, const std::string& v) {
      c.data.train_fraction = ToDouble("data.train_fraction", v);
    };
    t["data.val_fraction"] = [](RunConfig& c, const std::string& v) {
      c.data.val_fraction = ToDouble("data.val_fraction", v);
    };
    t["data.test_fraction"] = [](RunConfig& c, const std::string& v) {
      c.data.test_fraction = ToDouble("data.test_fraction", v);
    };
    t["data.split_seed"] = [](RunConfig& c, const std::string& v) {
      c.data.split_seed = ToSeed("data.split_seed", v);
    };
    t["data.clients"] = [](RunConfig& c, const std::string& v) {
      c.data.clients = ToInt32("data.clients", v);
    };
    t["data.partition_seed"] = [](RunConfig& c, const std::string& v) {
      c.data.partition_seed = ToSeed("data.partition_seed", v);
    };
    // [sampler]
    t["sampler.distribution"] = [](RunConfig& c, const std::string& v) {
      if (v == "uniform") {
        c.train.distribution = sampling::Distribution::kUniform;
      } else if (v == "degree") {
        c.train.distribution = sampling::Distribution::kDegree;
      } else {
        throw ValidationError("sampler.distribution: expected uniform or degree");
      }
    };
    t["sampler.batch_size"] = [](RunConfig& c, const std::string& v) {
      c.train.batch_size = ToInt32("sampler.batch_size", v);
    };
    t["sampler.normalize"] = [](RunConfig& c, const std::string& v) {
      c.train.normalize = ToBool("sampler.normalize", v);
    };
    t["sampler.enabled"] = [](RunConfig& c, const std::string& v) {
      c.train.sampling = ToBool("sampler.enabled", v);
    };
    // [model]
    t["model.layers"] = [](RunConfig& c, const std::string& v) {
      c.train.layers = ToInt32("model.layers", v);
    };
    t["model.hidden_dim"] = [](RunConfig& c, const std::string& v) {
      c.train.hidden_dim = ToInt32("model.hidden_dim", v);
    };
    t["model.dropout"] = [](RunConfig& c, const std::string& v) {
      c.train.dropout = ToDouble("model.dropout", v);
    };
    t["model.activation"] = [](RunConfig& c, const std::string& v) {
      if (v == "relu") {
        c.train.activation = gcn::Activation::kRelu;
      } else if (v == "identity") {
        c.train.activation = gcn::Activation::kIdentity;
      } else {
        throw ValidationError("model.activation: expected relu or identity");
      }
    };
    // [crypto]
    t["crypto.modulus_bits"] = [](RunConfig& c, const std::string& v) {
      c.train.key_bits = ToInt32("crypto.modulus_bits", v);
    };
    t["crypto.frac_bits"] = [](RunConfig& c, const std::string& v) {
      c.train.frac_bits = ToInt32("crypto.frac_bits", v);
    };
    // [transport]
    t["transport.encrypt"] = [](RunConfig& c, const std::string& v) {
      c.train.encrypted = ToBool("transport.encrypt", v);
    };
    t["transport.backend"] = [](RunConfig& c, const std::string& v) {
      if (v == "inproc") {
        c.train.bus.backend = transport::Backend::kInProc;
      } else if (v == "tcp") {
        c.train.bus.backend = transport::Backend::kTcp;
      } else {
        throw ValidationError("transport.backend: expected inproc or tcp");
      }
    };
    t["transport.timeout_ms"] = [](RunConfig& c, const std::string& v) {
      c.train.bus.timeout_ms = ToInt32("transport.timeout_ms", v);
    };
    // [train]
    t["train.iterations"] = [](RunConfig& c, const std::string& v) {
      c.train.iterations = ToInt32("train.iterations", v);
    };
    t["train.learning_rate"] = [](RunConfig& c, const std::string& v) {
      c.train.learning_rate = ToDouble("train.learning_rate", v);
    };
    t["train.optimizer"] = [](RunConfig& c, const std::string& v) {
      if (v == "sgd") {
        c.train.optimizer = trainer::Optimizer::kSgd;
      } else if (v == "adam") {
        c.train.optimizer = trainer::Optimizer::kAdam;
      } else {
        throw ValidationError("train.optimizer: expected sgd or adam");
      }
    };
    t["train.beta1"] = [](RunConfig& c, const std::string& v) {
      c.train.beta1 = ToDouble("train.beta1", v);
    };
    t["train.beta2"] = [](RunConfig& c, const std::string& v) {
      c.train.beta2 = ToDouble("train.beta2", v);
    };
    t["train.epsilon"] = [](RunConfig& c, const std::string& v) {
      c.train.epsilon = ToDouble("train.epsilon", v);
    };
    t["train.seed"] = [](RunConfig& c, const std::string& v) {
      c.train.seed = ToSeed("train.seed", v);
    };
    t["train.eval_every"] = [](RunConfig& c, const std::string& v) {
      c.train.eval_every = ToInt32("train.eval_every", v);
    };
    t["train.patience"] = [](RunConfig& c, const std::string& v) {
      c.train.patience = ToInt32("train.patience", v);
    };
    // [output]
    t["output.dir"] = [](RunConfig& c, const std::string& v) { c.output.dir = v; };
    t["output.metrics"] = [](RunConfig& c, const std::string& v) { c.output.metrics = v; };
    t["output.ledger"] = [](RunConfig& c, const std::string& v) { c.output.ledger = v; };
    t["output.summary"] = [](RunConfig& c, const std::string& v) { c.output.summary = v; };
    t["output.model"] = [](RunConfig& c, const std::string& v) { c.output.model = v; };
    return t;
  }();
  return table;
}

bool IsPathKey(const std::string& key) {
  return key == "data.nodes" || key == "data.edges" || key == "data.masks" ||
         key == "data.partition" || key == "output.dir";
}

}  // namespace

std::map<std::string, TomlValue> ParseToml(std::istream& in, const std::string& source) {
  std::map<std::string, TomlValue> out;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = Trim(StripComment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.size() < 3 || s.back() != ']' || s[1] == '[')
        throw ParseError(source, line, "malformed table header");
      section = Trim(s.substr(1, s.size() - 2));
      if (!IsBareKey(section)) throw ParseError(source, line, "invalid table name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(source, line, "expected key = value");
    const std::string key = Trim(s.substr(0, eq));
    std::string value = Trim(s.substr(eq + 1));
    if (!IsBareKey(key)) throw ParseError(source, line, "invalid key '" + key + "'");
    if (value.empty()) throw ParseError(source, line, "missing value");
    TomlValue v;
    v.line = line;
    if (value.front() == '"') {
      const std::size_t end = ParseQuoted(value, v.text, source, line);
      if (!Trim(value.substr(end)).empty())
        throw ParseError(source, line, "trailing characters after string");
      v.quoted = true;
    } else if (value.front() == '[' || value.front() == '{' || value.front() == '\'') {
      throw ParseError(source, line, "arrays, inline tables and literal strings are not supported");
    } else {
      if (value.find_first_of(" \t") != std::string::npos)
        throw ParseError(source, line, "unexpected whitespace in value");
      v.text = value;
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (!out.emplace(full, v).second) throw ParseError(source, line, "duplicate key " + full);
  }
  return out;
}

void Set(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = Setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ValidationError("unknown config key '" + key + "'");
  it->second(config, value);
}

void ApplyOverride(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("override must be key=value: " + assignment);
  const std::string key = Trim(assignment.substr(0, eq));
  std::string value = Trim(assignment.substr(eq + 1));
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
    value = value.substr(1, value.size() - 2);
  Set(config, key, value);
}

RunConfig ParseConfig(std::istream& in, const std::string& source, const std::string& base_dir) {
  RunConfig config;
  for (const auto& [key, v] : ParseToml(in, source)) {
    std::string text = v.text;
    if (IsPathKey(key) && !text.empty() && !base_dir.empty() &&
        std::filesystem::path(text).is_relative())
      text = (std::filesystem::path(base_dir) / text).string();
    try {
      Set(config, key, text);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, v.line, e.what());
    }
  }
  return config;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  return ParseConfig(in, path, std::filesystem::path(path).parent_path().string());
}

std::vector<std::string> KnownKeys() {
  std::vector<std::string> keys;
  for (const auto& [k, setter] : Setters()) keys.push_back(k);
  return keys;
}

Dataset LoadDataset(const DataConfig& data) {
  if (data.nodes.empty() || data.edges.empty())
    throw ValidationError("data.nodes and data.edges are required");
  graph::MaskSpec masks;
  if (!data.masks.empty()) masks.json_path = data.masks;
  masks.train = data.train_fraction;
  masks.val = data.val_fraction;
  masks.test = data.test_fraction;
  masks.seed = data.split_seed;
  Dataset d;
  d.graph = graph::BuildGlobal(data.nodes, data.edges, masks);
  d.partition = data.partition.empty()
                    ? graph::PartitionRandom(d.graph.n, data.clients, data.partition_seed)
                    : graph::LoadPartition(data.partition, d.graph.n);
  if (!data.partition.empty() && d.partition.m != data.clients)
    throw ValidationError("partition file uses " + std::to_string(d.partition.m) +
                          " clients but data.clients is " + std::to_string(data.clients));
  d.shards = graph::Shard(d.graph, d.partition);
  return d;
}

}  // namespace ppsgcn::config
