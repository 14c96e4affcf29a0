#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hecke {

// Worker count: HECKE_THREADS if set and positive, else the hardware concurrency.
inline int thread_count() {
    int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* e = std::getenv("HECKE_THREADS")) {
        try {
            int n = std::stoi(e);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return hw;
}

// Runs body(i) for i in [0, n) on a pool; the first exception is rethrown after joining.
template <class F>
void parallel_for(int n, F&& body) {
    int nt = std::min(thread_count(), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (int i; (i = next++) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lk(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace hecke
