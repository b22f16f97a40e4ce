#pragma once

#include <functional>

namespace dyson {

// Worker count used by the data-parallel loops. Results never depend on it.
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n) over contiguous chunks.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace dyson
