#include "acnet/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace acnet {

int worker_count()
{
    if (const char* env = std::getenv("ACNET_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t, int)>& body)
{
    if (n == 0) return;
    // Tiny ranges are not worth a thread.
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(worker_count()),
                                                                         std::max<std::size_t>(1, n / 16)));
    if (workers <= 1) {
        body(0, n, 0);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end, w] {
            try {
                body(begin, end, static_cast<int>(w));
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace acnet
