#pragma once

#include "lwp/random.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lwp {

/// Replicas are cut into fixed-size blocks; block b always draws from
/// make_stream(seed, b). The partition is independent of the worker count, so
/// results written by index are identical for any number of workers.
inline constexpr std::size_t kReplicaBlock = 1024;

struct RunConfig {
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

/// Calls fn(index, rng) for index in [0, count). Each block of kReplicaBlock
/// consecutive indices shares one stream and runs sequentially on one worker.
template <class Fn>
void for_each_replica(std::size_t count, const RunConfig& config, Fn&& fn) {
    const std::size_t blocks = (count + kReplicaBlock - 1) / kReplicaBlock;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                Rng rng = make_stream(config.seed, b);
                const std::size_t end = std::min(count, (b + 1) * kReplicaBlock);
                for (std::size_t i = b * kReplicaBlock; i < end; ++i) fn(i, rng);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
                return;
            }
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(blocks)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace lwp
