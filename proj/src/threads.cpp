#include "plq/threads.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plq {

int resolve_threads(int requested) {
#ifdef _OPENMP
    int hw = omp_get_max_threads();
#else
    int hw = 1;
#endif
    if (requested > 0) return std::min(requested, hw);
    if (const char* env = std::getenv("PERSUASION_LQ_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return std::min(n, hw);
        } catch (...) {
            // unparsable values fall through to the default
        }
    }
    return hw;
}

}  // namespace plq
