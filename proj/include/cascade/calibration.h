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

#ifndef CASCADE_CALIBRATION_H_
#define CASCADE_CALIBRATION_H_

#include <span>

namespace cascade {

struct FieldRce {
  double value = 0.0;
  int fields_used = 0;
  int fields_skipped = 0;  // fields whose labels sum to zero
};

// Field-level relative calibration error:
//
//   (1/|D|) * sum_f |sum_{i in D_f} (y_i - yhat_i)| / mean_{i in D_f} y_i
//
// Fields with a zero label sum are skipped and counted. Throws DomainError on
// length mismatch or when every field is skipped.
FieldRce field_rce(std::span<const double> predictions,
                   std::span<const double> labels,
                   std::span<const int> field_values);

}  // namespace cascade

#endif  // CASCADE_CALIBRATION_H_
