#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace latrg {

enum class ExecPolicy { Serial, Parallel };

// Deterministic reduction over [0, n): partial accumulators are computed per
// fixed-size block and combined in ascending block order, so the result is
// identical for any thread count (and equals the Serial policy bit-for-bit).
//
// Body signature: void(std::int64_t begin, std::int64_t end, double* acc)
// where acc points at n_acc zero-initialized doubles for that block.
template <class Body>
std::vector<double> blocked_reduce(std::int64_t n, int n_acc, ExecPolicy policy,
                                   Body&& body, std::int64_t block_size = 1 << 14) {
    const std::int64_t n_blocks = n > 0 ? (n + block_size - 1) / block_size : 0;
    std::vector<double> partials(static_cast<std::size_t>(n_blocks) * n_acc, 0.0);

#ifdef _OPENMP
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < n_blocks; ++b) {
            const std::int64_t lo = b * block_size;
            const std::int64_t hi = std::min(n, lo + block_size);
            body(lo, hi, partials.data() + b * n_acc);
        }
    } else
#endif
    {
        (void)policy;
        for (std::int64_t b = 0; b < n_blocks; ++b) {
            const std::int64_t lo = b * block_size;
            const std::int64_t hi = std::min(n, lo + block_size);
            body(lo, hi, partials.data() + b * n_acc);
        }
    }

    std::vector<double> acc(n_acc, 0.0);
    for (std::int64_t b = 0; b < n_blocks; ++b)
        for (int j = 0; j < n_acc; ++j) acc[j] += partials[b * n_acc + j];
    return acc;
}

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace latrg
