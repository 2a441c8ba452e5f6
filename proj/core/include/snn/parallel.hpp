#pragma once

#include <cstddef>
#include <functional>

namespace snn {

// Worker count used by parallel loops; defaults to 1.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n); work items must write to disjoint outputs.
// The first exception thrown by any item is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Pairwise (cascade) summation, independent of thread count.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace snn
