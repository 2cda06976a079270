#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bmf::detail {

inline std::size_t chunk_count(std::size_t n, unsigned threads)
{
    return std::max<std::size_t>(1, std::min<std::size_t>(n, std::max(1u, threads)));
}

// Splits [0, n) into chunk_count(n, threads) contiguous ranges and runs
// fn(chunk, begin, end) on each, concurrently when OpenMP is available.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn)
{
    const std::size_t chunks = chunk_count(n, threads);
    const auto bounds = [&](std::size_t c) { return c * n / chunks; };
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(static_cast<int>(std::max(1u, threads))) if (chunks > 1)
#endif
    for (std::size_t c = 0; c < chunks; ++c) fn(c, bounds(c), bounds(c + 1));
}

}  // namespace bmf::detail
