#pragma once

#include <cstddef>
#include <functional>
#include <limits>

namespace affdim {

// Worker count used by all data-parallel loops. Results never depend on it.
void set_thread_count(int threads);
int thread_count();

// Calls body(i) for i in [0, count) across the worker pool. Each index is
// visited exactly once; callers write results into per-index slots and
// combine them in index order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Numerically stable running log-sum-exp. Merge order is fixed by the caller.
struct LogSumExp {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double x);
    void merge(const LogSumExp& other);
    double value() const;
};

}  // namespace affdim
