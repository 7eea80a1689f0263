#include "ospca/runtime.hpp"

#include <atomic>
#include <thread>

namespace ospca {

namespace {
std::atomic<unsigned> g_max_threads{1};
}

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned effective_threads() {
    unsigned n = g_max_threads.load();
    if (n == 0) {
        n = std::thread::hardware_concurrency();
        if (n == 0) n = 1;
    }
    return n;
}

}  // namespace ospca
