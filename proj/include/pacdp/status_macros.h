// Copyright 2026 The pacdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PACDP_STATUS_MACROS_H_
#define PACDP_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define PACDP_CONCAT_INNER_(a, b) a##b
#define PACDP_CONCAT_(a, b) PACDP_CONCAT_INNER_(a, b)

#define PACDP_RETURN_IF_ERROR(expr)          \
  do {                                       \
    ::absl::Status _pacdp_status = (expr);   \
    if (!_pacdp_status.ok()) {               \
      return _pacdp_status;                  \
    }                                        \
  } while (false)

#define PACDP_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                 \
  if (!tmp.ok()) {                                    \
    return tmp.status();                              \
  }                                                   \
  lhs = std::move(tmp).value()

// Evaluates `rexpr` (an absl::StatusOr<T>); on error returns the status,
// otherwise moves the value into `lhs`.
#define PACDP_ASSIGN_OR_RETURN(lhs, rexpr) \
  PACDP_ASSIGN_OR_RETURN_IMPL_(            \
      PACDP_CONCAT_(_pacdp_statusor_, __LINE__), lhs, rexpr)

#endif  // PACDP_STATUS_MACROS_H_
