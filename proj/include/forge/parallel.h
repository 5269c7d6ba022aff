// Copyright 2026 The Corpus Forge Authors
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

#ifndef FORGE_PARALLEL_H_
#define FORGE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace forge {

// Process-wide worker count. Defaults to $FORGE_THREADS, else 1.
int ThreadCount();
void SetThreadCount(int threads);

// Runs body(begin, end) over [0, n) split into contiguous chunks of
// `grain` items. Chunk boundaries depend only on n and grain, never on the
// thread count, so per-chunk results can be merged in a fixed order.
// Exceptions thrown by body are rethrown on the calling thread (first one
// by chunk index wins).
void ParallelFor(std::size_t n, std::size_t grain,
                 const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace forge

#endif  // FORGE_PARALLEL_H_
