#include "affdim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace affdim {

namespace {

std::atomic<int> g_threads{0};
thread_local bool t_inside_pool = false;

}  // namespace

void set_thread_count(int threads) { g_threads = std::max(0, threads); }

int thread_count() {
    const int t = g_threads.load();
    if (t > 0) return t;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
    if (workers <= 1 || t_inside_pool) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        const bool was_inside = t_inside_pool;
        t_inside_pool = true;
        struct Restore {
            bool value;
            ~Restore() { t_inside_pool = value; }
        } restore{was_inside};
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void LogSumExp::add(double x) {
    if (x == -INFINITY) return;
    if (x <= max) {
        sum += std::exp(x - max);
    } else {
        sum = sum * std::exp(max - x) + 1.0;
        max = x;
    }
}

void LogSumExp::merge(const LogSumExp& other) {
    if (other.max == -INFINITY) return;
    if (max == -INFINITY) {
        *this = other;
        return;
    }
    if (other.max <= max) {
        sum += other.sum * std::exp(other.max - max);
    } else {
        sum = sum * std::exp(max - other.max) + other.sum;
        max = other.max;
    }
}

double LogSumExp::value() const { return max == -INFINITY ? -INFINITY : max + std::log(sum); }

}  // namespace affdim
