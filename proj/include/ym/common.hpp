#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ym {

// Invalid input parameters or descriptors (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical guard tripped in strict mode (CLI exit code 3).
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Diagnostics {
    bool strict = false;
    std::vector<std::string> warnings;

    // Records the warning; throws NumericalGuardError in strict mode.
    void warn(const std::string& msg) {
        warnings.push_back(msg);
        if (strict) throw NumericalGuardError(msg);
    }
};

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs body(begin, end, chunk) over fixed chunks of [0, n). Chunk boundaries depend only
// on n, so per-chunk partial results combined in chunk order are independent of workers.
template <class Body>
void parallel_chunks(std::size_t n, int workers, Body body, std::size_t chunk_size = 256) {
    if (n == 0) return;
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    const int w = std::max(1, std::min<int>(resolve_workers(workers), static_cast<int>(chunks)));
    auto run = [&](int id) {
        for (std::size_t c = id; c < chunks; c += w) {
            const std::size_t b = c * chunk_size;
            body(b, std::min(n, b + chunk_size), c);
        }
    };
    if (w == 1) {
        run(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int id = 0; id < w; ++id) pool.emplace_back(run, id);
    for (auto& t : pool) t.join();
}

template <class Body>
double parallel_sum(std::size_t n, int workers, Body term, std::size_t chunk_size = 256) {
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    std::vector<double> partial(chunks, 0.0);
    parallel_chunks(
        n, workers,
        [&](std::size_t b, std::size_t e, std::size_t c) {
            double s = 0.0;
            for (std::size_t i = b; i < e; ++i) s += term(i);
            partial[c] = s;
        },
        chunk_size);
    double s = 0.0;
    for (double v : partial) s += v;
    return s;
}

// SplitMix64 finalizer; used to derive independent per-sample seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace ym
