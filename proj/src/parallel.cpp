#include "aniso/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace aniso {

namespace {
thread_local bool inside_worker = false;
}

int thread_count() {
    if (const char* env = std::getenv("ANISO_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    const int workers = inside_worker ? 1 : std::min(thread_count(), n);
    if (workers == 1) {
        for (int k = 0; k < n; ++k) body(k);
        return;
    }
    std::exception_ptr first;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            inside_worker = true;
            for (int k = w; k < n; k += workers) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(guard);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

}  // namespace aniso
