// Copyright 2026 The cascade-alloc Authors
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

#include "cascade/calibration.h"

#include <cmath>
#include <map>

#include "cascade/error.h"

namespace cascade {

FieldRce field_rce(std::span<const double> predictions,
                   std::span<const double> labels,
                   std::span<const int> field_values) {
  if (predictions.size() != labels.size() ||
      labels.size() != field_values.size()) {
    throw DomainError("field_rce: predictions, labels and fields differ in "
                      "length");
  }
  struct Acc {
    double residual = 0.0;
    double label_sum = 0.0;
    long count = 0;
  };
  std::map<int, Acc> fields;
  for (size_t i = 0; i < labels.size(); ++i) {
    Acc& a = fields[field_values[i]];
    a.residual += labels[i] - predictions[i];
    a.label_sum += labels[i];
    ++a.count;
  }

  FieldRce out;
  double total = 0.0;
  for (const auto& [field, a] : fields) {
    if (a.label_sum == 0.0) {
      ++out.fields_skipped;
      continue;
    }
    const double mean_label = a.label_sum / static_cast<double>(a.count);
    total += std::abs(a.residual) / mean_label;
    ++out.fields_used;
  }
  if (out.fields_used == 0) {
    throw DomainError("field_rce: undefined, every field has zero labels");
  }
  out.value = total / static_cast<double>(labels.size());
  return out;
}

}  // namespace cascade
