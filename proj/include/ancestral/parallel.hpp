#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ancestral {

/// How a Monte Carlo loop is executed. Results never depend on this: every
/// replicate draws from its own substream and tallies are integer sums.
struct Exec {
    /// OpenMP thread count; 0 keeps the runtime default.
    int workers = 0;
    /// Plain sequential loop without any OpenMP region (reference path).
    bool serial = false;

    static Exec serial_reference() { return {1, true}; }
    static Exec with_workers(int w) { return {w, false}; }
};

inline int available_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs body(r, tally) for r in [0, reps) and sums the per-thread tallies.
/// Tally must be default-constructible with an order-insensitive operator+=.
template <class Tally, class Body>
Tally replicate_reduce(std::uint64_t reps, const Exec& exec, Body&& body) {
    Tally total{};
    if (exec.serial) {
        for (std::uint64_t r = 0; r < reps; ++r) body(r, total);
        return total;
    }
    const auto n = static_cast<std::int64_t>(reps);
#ifdef _OPENMP
    const int threads = exec.workers > 0 ? exec.workers : omp_get_max_threads();
#pragma omp parallel num_threads(threads)
    {
        Tally local{};
#pragma omp for schedule(static)
        for (std::int64_t r = 0; r < n; ++r) body(static_cast<std::uint64_t>(r), local);
#pragma omp critical(ancestral_replicate_reduce)
        total += local;
    }
#else
    for (std::int64_t r = 0; r < n; ++r) body(static_cast<std::uint64_t>(r), total);
#endif
    return total;
}

}  // namespace ancestral
