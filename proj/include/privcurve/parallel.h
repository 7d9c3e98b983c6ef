#pragma once

#include <functional>

namespace privcurve {

// Worker count resolution: the PRIVCURVE_THREADS environment variable if set
// to a positive integer, otherwise std::thread::hardware_concurrency().
int default_thread_count();

// Runs body(0..n-1), possibly on several threads. Work items must be
// independent; callers that need determinism write into index-addressed
// slots and reduce sequentially afterwards. threads = 0 means the default.
// The first exception thrown by a body is rethrown after all workers join.
void parallel_for(int n, const std::function<void(int)>& body,
                  int threads = 0);

}  // namespace privcurve
