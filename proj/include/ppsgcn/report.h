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

#ifndef PPSGCN_REPORT_H_
#define PPSGCN_REPORT_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ppsgcn/trainer.h"
#include "ppsgcn/transport.h"

namespace ppsgcn::report {

// iteration,time_s,loss,val_f1,comm_scalars,mem_scalars. val_f1 is empty
// for iterations without an evaluation.
void WriteMetricsCsv(const std::vector<trainer::EpochRecord>& records, std::ostream& out);

struct Summary {
  int iterations = 0;
  double final_loss = 0;
  std::optional<double> val_f1;
  std::optional<double> test_f1;
  std::int64_t total_scalars = 0;  // every ledger row, sample ids included
  std::int64_t total_ciphertexts = 0;
  std::int64_t peak_mem_scalars = 0;
};

Summary Summarize(const std::vector<trainer::EpochRecord>& records,
                  const transport::CommLedger& ledger);
void WriteSummary(const Summary& summary, std::ostream& out);

void WriteAblationTable(const std::vector<trainer::AblationRow>& rows, std::ostream& out);

// Model parameters as JSON {"dims": [...], "weights": [[row-major], ...]}.
// Doubles round-trip exactly.
void SaveParams(const gcn::ModelParams& params, std::ostream& out);
gcn::ModelParams LoadParams(std::istream& in);

}  // namespace ppsgcn::report

#endif  // PPSGCN_REPORT_H_
