#include "needlelab/parallel.hpp"

#include <atomic>

namespace needlelab {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) {
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    g_threads.store(n);
}

int thread_count() { return g_threads.load(); }

} // namespace needlelab
