#include "mixhit/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace mixhit {

void apply_thread_env() {
    const char* value = std::getenv("MIXHIT_THREADS");
    if (value == nullptr) return;
    try {
        int n = std::stoi(value);
        if (n >= 1) omp_set_num_threads(n);
    } catch (const std::exception&) {
    }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace mixhit
