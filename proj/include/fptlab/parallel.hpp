#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace fptlab {

/// Worker count: FPTLAB_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Calls body(i) for i in [0, n), split into contiguous blocks over
/// worker_count() threads. body must only write state owned by index i.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise summation in index order; the result depends only on the input,
/// never on how it was produced.
double pairwise_sum(std::span<const double> xs);

}  // namespace fptlab
