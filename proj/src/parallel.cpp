#include "d3r/parallel.hpp"

#include <atomic>

namespace d3r {

namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int n) {
    if (n <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    g_threads.store(n);
}

int num_threads() { return g_threads.load(); }

} // namespace d3r
