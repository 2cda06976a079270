#include "bmf/threads.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace bmf {

unsigned resolve_threads(unsigned requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BMF_THREADS")) {
        unsigned v = 0;
        const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
        if (ec == std::errc{} && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace bmf
