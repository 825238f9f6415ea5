#pragma once

#include <cstdint>
#include <functional>

namespace riswie {

// Worker count resolution: explicit request > RISWIE_JOBS environment
// variable > hardware concurrency. Always at least 1.
int resolve_jobs(int requested);

// Runs body(i) for i in [0, count) on up to `jobs` threads (jobs <= 0 resolves
// via resolve_jobs(0)). Tasks must be independent and write only to their own
// slot of any shared output, so results are identical for every worker count;
// only wall-clock time changes. If any task throws, the exception thrown by
// the lowest index is rethrown after all workers finish.
void parallel_for(std::int64_t count, int jobs,
                  const std::function<void(std::int64_t)>& body);

}  // namespace riswie
