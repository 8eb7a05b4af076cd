#include "campo/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace campo {

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
    int n = g_threads.load();
    if (n == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n;
}

void parallel_chunks(int64_t n, int64_t chunk_size,
                     const std::function<void(int64_t, int64_t, int64_t)>& fn) {
    if (n <= 0) return;
    chunk_size = std::max<int64_t>(1, chunk_size);
    const int64_t num_chunks = (n + chunk_size - 1) / chunk_size;
    const int workers = std::min<int64_t>(thread_count(), num_chunks);

    if (workers <= 1) {
        for (int64_t c = 0; c < num_chunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }

    std::atomic<int64_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const int64_t c = next.fetch_add(1);
            if (c >= num_chunks || failed.load()) return;
            try {
                fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace campo
