#include "rd/threads.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace rd {

int thread_cap() {
    static const int cap = [] {
        if (const char* env = std::getenv("RD_PDHG_THREADS")) {
            try {
                const int n = std::stoi(env);
                if (n > 0) {
                    omp_set_num_threads(n);
                    return n;
                }
            } catch (...) {
            }
        }
        return omp_get_max_threads();
    }();
    return cap;
}

} // namespace rd
