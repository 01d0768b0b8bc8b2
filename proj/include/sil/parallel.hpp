#pragma once
// deterministic work splitting: the chunk decomposition depends only on the
// problem size, workers pull chunks atomically, and callers reduce per-chunk
// results in chunk order. Output is identical for every thread count.
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace sil {

// number of chunks for n items; pure function of n
inline size_t chunk_count(size_t n) {
    if (n == 0) return 0;
    size_t c = (n + 1023) / 1024;  // at least 1024 items per chunk
    return c < 256 ? c : 256;
}

// fn(chunk_index, begin, end) over [0, n) split into chunk_count(n) chunks.
// fn must only write to state owned by its chunk index.
template <class Fn>
void parallel_chunks(size_t n, int threads, Fn&& fn) {
    size_t nc = chunk_count(n);
    if (nc == 0) return;
    size_t step = (n + nc - 1) / nc;
    if (threads <= 1 || nc == 1) {
        for (size_t c = 0; c < nc; ++c) {
            size_t b = c * step, e = b + step < n ? b + step : n;
            fn(c, b, e);
        }
        return;
    }
    std::atomic<size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            size_t c = cursor.fetch_add(1);
            if (c >= nc) return;
            size_t b = c * step, e = b + step < n ? b + step : n;
            fn(c, b, e);
        }
    };
    size_t nw = (size_t)threads < nc ? (size_t)threads : nc;
    std::vector<std::thread> pool;
    for (size_t i = 1; i < nw; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

// chunk-ordered reduction of per-chunk partials produced by part(c, b, e)
template <class T, class PartFn, class JoinFn>
T parallel_reduce(size_t n, int threads, T init, PartFn&& part, JoinFn&& join) {
    size_t nc = chunk_count(n);
    std::vector<T> slots(nc, init);
    parallel_chunks(n, threads, [&](size_t c, size_t b, size_t e) { slots[c] = part(b, e); });
    T acc = init;
    for (size_t c = 0; c < nc; ++c) acc = join(acc, slots[c]);
    return acc;
}

}  // namespace sil
