#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace nlc {

/// Pairwise (tree) summation over a span, in a tree shape fixed by the length.
/// Used everywhere a reduction feeds a reported number: the result depends only
/// on the sequence order, never on chunking or worker count.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double s = 0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

/// Streaming pairwise accumulator: buffers values in fixed-size blocks, reduces
/// each block pairwise, then reduces the block partials pairwise.
class PairwiseAccumulator {
public:
    void add(double x) {
        buf_.push_back(x);
        if (buf_.size() == kBlock) flush();
    }

    double total() {
        if (!buf_.empty()) flush();
        return pairwise_sum(partials_);
    }

private:
    static constexpr std::size_t kBlock = 4096;
    void flush() {
        partials_.push_back(pairwise_sum(buf_));
        buf_.clear();
    }
    std::vector<double> buf_;
    std::vector<double> partials_;
};

/// Run `tasks` on up to `workers` threads. Each task writes only to its own
/// output slot, so outputs are identical for any worker count.
inline void run_tasks(std::vector<std::function<void()>>& tasks, int workers) {
    if (workers <= 1 || tasks.size() <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex m;
    auto body = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lk(m);
                if (next >= tasks.size()) return;
                i = next++;
            }
            tasks[i]();
        }
    };
    int k = std::min<int>(workers, int(tasks.size()));
    pool.reserve(std::size_t(k));
    for (int i = 0; i < k; ++i) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

} // namespace nlc
