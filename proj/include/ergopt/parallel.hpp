#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ergopt {

/// Every data-parallel kernel in the library is written against this policy:
/// Serial runs the plain loop (the reference used by the consistency tests),
/// Parallel runs the same body under an OpenMP static schedule. Kernel bodies
/// only write to their own index or feed order-independent reductions
/// (min/max/all-of), so both policies produce identical results.
enum class ExecPolicy { Serial, Parallel };

template <class Body>
void for_each_index(ExecPolicy policy, std::ptrdiff_t n, Body&& body) {
#ifdef _OPENMP
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
#else
    (void)policy;
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace ergopt
