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

#ifndef PPSGCN_CONFIG_H_
#define PPSGCN_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppsgcn/graph.h"
#include "ppsgcn/trainer.h"

namespace ppsgcn::config {

// Flat "section.key" view of a TOML document. Supports tables, comments,
// and string / integer / float / boolean scalars; arrays and inline tables
// are rejected.
struct TomlValue {
  std::string text;
  bool quoted = false;
  std::size_t line = 0;
};
std::map<std::string, TomlValue> ParseToml(std::istream& in,
                                           const std::string& source = "<config>");

struct DataConfig {
  std::string nodes;
  std::string edges;
  std::string masks;      // JSON mask file; empty selects the fractional split
  std::string partition;  // partition file; empty selects a random partition
  double train_fraction = 0.7;
  double val_fraction = 0.1;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;
  int clients = 4;
  std::uint64_t partition_seed = 0;
};

struct OutputConfig {
  std::string dir = ".";
  std::string metrics = "metrics.csv";
  std::string ledger = "ledger.csv";
  std::string summary = "summary.txt";
  std::string model = "model.json";
};

struct RunConfig {
  DataConfig data;
  trainer::TrainConfig train;
  OutputConfig output;
};

// Applies one key (e.g. "sampler.batch_size") to the config; the same path
// handles file entries and command-line overrides.
void Set(RunConfig& config, const std::string& key, const std::string& value);
// "key=value"; the value may be quoted.
void ApplyOverride(RunConfig& config, const std::string& assignment);

// Reads a config file. Relative data and output paths resolve against the
// file's directory.
RunConfig LoadConfig(const std::string& path);
RunConfig ParseConfig(std::istream& in, const std::string& source = "<config>",
                      const std::string& base_dir = "");

std::vector<std::string> KnownKeys();

struct Dataset {
  graph::GlobalGraph graph;
  graph::Partition partition;
  std::vector<graph::ClientShard> shards;
};

Dataset LoadDataset(const DataConfig& data);

}  // namespace ppsgcn::config

#endif  // PPSGCN_CONFIG_H_
