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

#include "ppsgcn/report.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "ppsgcn/error.h"

namespace ppsgcn::report {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void WriteMetricsCsv(const std::vector<trainer::EpochRecord>& records, std::ostream& out) {
  out << "iteration,time_s,loss,val_f1,comm_scalars,mem_scalars\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << Num(r.time_s) << ',' << Num(r.loss) << ','
        << (r.val_f1 ? Num(*r.val_f1) : "") << ',' << r.comm_scalars << ','
        << r.mem_scalars << '\n';
  }
}

Summary Summarize(const std::vector<trainer::EpochRecord>& records,
                  const transport::CommLedger& ledger) {
  Summary s;
  s.iterations = static_cast<int>(records.size());
  if (!records.empty()) s.final_loss = records.back().loss;
  for (const auto& r : records) {
    if (r.val_f1) s.val_f1 = r.val_f1;
    s.peak_mem_scalars = std::max(s.peak_mem_scalars, r.mem_scalars);
  }
  for (const auto& row : ledger.rows()) {
    s.total_scalars += row.scalars;
    s.total_ciphertexts += row.ciphertexts;
  }
  return s;
}

void WriteSummary(const Summary& s, std::ostream& out) {
  out << "iterations: " << s.iterations << '\n'
      << "final_loss: " << Num(s.final_loss) << '\n'
      << "val_f1: " << (s.val_f1 ? Num(*s.val_f1) : "n/a") << '\n'
      << "test_f1: " << (s.test_f1 ? Num(*s.test_f1) : "n/a") << '\n'
      << "total_scalars: " << s.total_scalars << '\n'
      << "total_ciphertexts: " << s.total_ciphertexts << '\n'
      << "peak_mem_scalars: " << s.peak_mem_scalars << '\n';
}

void WriteAblationTable(const std::vector<trainer::AblationRow>& rows, std::ostream& out) {
  out << "variant,val_f1,test_f1,scaling_events\n";
  for (const auto& r : rows)
    out << r.variant << ',' << Num(r.val_f1) << ',' << Num(r.test_f1) << ','
        << r.scaling_events << '\n';
}

void SaveParams(const gcn::ModelParams& params, std::ostream& out) {
  nlohmann::json j;
  j["dims"] = params.dims;
  j["weights"] = nlohmann::json::array();
  for (const Matrix& w : params.weights) {
    std::vector<double> flat;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    j["weights"].push_back(flat);
  }
  out << j.dump() << '\n';
}

gcn::ModelParams LoadParams(std::istream& in) {
  gcn::ModelParams p;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    p.dims = j.at("dims").get<std::vector<int>>();
    const auto& ws = j.at("weights");
    if (p.dims.size() != ws.size() + 1) throw ValidationError("model file: dims/weights mismatch");
    for (std::size_t l = 0; l < ws.size(); ++l) {
      const auto flat = ws[l].get<std::vector<double>>();
      const int rows = p.dims[l], cols = p.dims[l + 1];
      if (static_cast<std::int64_t>(flat.size()) != static_cast<std::int64_t>(rows) * cols)
        throw ValidationError("model file: weight " + std::to_string(l + 1) + " has wrong size");
      Matrix w(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) w(r, c) = flat[static_cast<std::size_t>(r) * cols + c];
      p.weights.push_back(std::move(w));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
  p.Validate();
  return p;
}

}  // namespace ppsgcn::report
