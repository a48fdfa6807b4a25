// Copyright 2026 The QVD Authors
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

#pragma once

#include <cstddef>
#include <functional>

namespace qvd {

/// Resolves a requested worker count: values >= 1 pass through, 0 reads
/// QVD_THREADS and falls back to 1.
int resolve_threads(int requested);

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// handed out dynamically; callers write results into slot i so the outcome does
/// not depend on scheduling. The first exception (lowest index) is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace qvd
