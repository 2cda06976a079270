#pragma once

namespace bmf {

// Resolves a requested worker count: 0 means "auto", taken from the BMF_THREADS
// environment variable when set, otherwise the hardware concurrency.
unsigned resolve_threads(unsigned requested);

}  // namespace bmf
