#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace airyedge {

// Worker cap: min(hardware, AIRY_EDGE_THREADS, explicit request).
int max_threads(int requested = 0);

// Static partition of [0, count) across workers. Tasks must be independent;
// each derives anything random from its own index, so results are identical
// for every thread count.
void parallel_for(int64_t count, const std::function<void(int64_t)>& body,
                  int requested_threads = 0);

}  // namespace airyedge
