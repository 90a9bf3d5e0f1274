//
// Copyright 2026 The dpfilter Authors
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
//


#ifndef DPFILTER_CORE_SRC_STATUS_MACROS_H_
#define DPFILTER_CORE_SRC_STATUS_MACROS_H_

#include "absl/status/status.h"

#define DPFILTER_STATUS_CONCAT_INNER_(x, y) x##y
#define DPFILTER_STATUS_CONCAT_(x, y) DPFILTER_STATUS_CONCAT_INNER_(x, y)

#define DPFILTER_RETURN_IF_ERROR(expr)             \
  do {                                             \
    const absl::Status dpfilter_status_ = (expr);  \
    if (!dpfilter_status_.ok()) return dpfilter_status_; \
  } while (0)

#define DPFILTER_ASSIGN_OR_RETURN(lhs, expr)                              \
  DPFILTER_ASSIGN_OR_RETURN_IMPL_(                                        \
      DPFILTER_STATUS_CONCAT_(dpfilter_statusor_, __LINE__), lhs, expr)

#define DPFILTER_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, expr) \
  auto statusor = (expr);                                    \
  if (!statusor.ok()) return statusor.status();              \
  lhs = std::move(statusor).value()

#endif  // DPFILTER_CORE_SRC_STATUS_MACROS_H_
