#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace enso {

// Global worker cap, settable from the CLI --threads flag.
int max_threads();
void set_max_threads(int n);

// Chunked parallel loop over [0, n). Each index is processed exactly once;
// work items must write only to their own output slots. Exceptions are
// captured and the first one rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace enso
