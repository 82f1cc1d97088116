#ifndef TWINBEAM_RANDOM_HPP_
#define TWINBEAM_RANDOM_HPP_

// Seeded random streams shared by the Monte Carlo layers.
//
// Only std::mt19937_64 and std::seed_seq are used from <random>; both are
// fully specified by the standard. The distribution transforms below are
// written out so that streams are identical across standard libraries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

namespace twinbeam {

using Rng = std::mt19937_64;

/// Events are generated in chunks of this size; chunk i always uses the
/// stream derived from (seed, i), whatever the number of worker threads.
inline constexpr std::size_t kChunkSize = 8192;

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Thermal (geometric) photon number with mean mu: P(n) = mu^n / (1+mu)^(n+1).
inline long thermal_draw(Rng& rng, double mu) {
    if (mu <= 0.0) return 0;
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double q = mu / (1.0 + mu);
    return static_cast<long>(std::floor(std::log(u) / std::log(q)));
}

/// Number of survivors when each of n photons is kept with probability tau.
inline long binomial_draw(Rng& rng, long n, double tau) {
    if (tau >= 1.0) return n;
    if (tau <= 0.0) return 0;
    long kept = 0;
    for (long i = 0; i < n; ++i)
        if (uniform01(rng) < tau) ++kept;
    return kept;
}

inline unsigned default_workers() {
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(chunk_index, begin, end) for every chunk of [0, count), spread
/// over `workers` threads. The first exception thrown by any chunk is
/// rethrown once all workers have joined.
template <class Body>
void for_each_chunk(std::size_t count, unsigned workers, Body&& body) {
    const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(chunks, 1)));
    auto run = [&](unsigned w, std::exception_ptr& err) {
        try {
            for (std::size_t c = w; c < chunks; c += workers) {
                const std::size_t begin = c * kChunkSize;
                body(c, begin, std::min(count, begin + kChunkSize));
            }
        } catch (...) {
            err = std::current_exception();
        }
    };
    std::vector<std::exception_ptr> errors(workers);
    if (workers == 1) {
        run(0, errors[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, std::ref(errors[w]));
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace twinbeam

#endif // TWINBEAM_RANDOM_HPP_
