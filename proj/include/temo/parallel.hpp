#pragma once

// Data-parallel execution helper. Work is split into one contiguous block per
// lane; every kernel built on top of it computes each output element from its
// inputs alone, so results are identical for any lane count.

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace temo {

namespace detail {

class ThreadPool {
public:
    static ThreadPool& instance() {
        static ThreadPool pool;
        return pool;
    }

    std::size_t width() const { return width_; }

    void set_width(std::size_t w) {
        if (w == 0) {
            w = default_width();
        }
        std::lock_guard<std::mutex> lk(run_mutex_);
        grow_to(w - 1);
        width_ = w;
    }

    // body(lane_begin, lane_end) over [0, n), chunked by lane.
    void run(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
        const std::size_t w = std::min<std::size_t>(width_, std::max<std::size_t>(n, 1));
        if (w <= 1 || n < serial_cutoff || in_parallel_region()) {
            body(0, n);
            return;
        }
        std::lock_guard<std::mutex> lk(run_mutex_);
        in_parallel_region() = true;
        const std::size_t chunk = (n + w - 1) / w;
        job_ = &body;
        chunk_size_ = chunk;
        total_ = n;
        lanes_busy_.store(static_cast<int>(w - 1), std::memory_order_release);
        {
            std::lock_guard<std::mutex> g(wake_mutex_);
            active_lanes_ = w - 1;
            ++epoch_;
        }
        wake_cv_.notify_all();
        body(0, std::min(chunk, n)); // lane 0 runs inline
        std::unique_lock<std::mutex> g(done_mutex_);
        done_cv_.wait(g, [&] { return lanes_busy_.load(std::memory_order_acquire) == 0; });
        job_ = nullptr;
        in_parallel_region() = false;
    }

    // Below this many items the dispatch overhead dominates; run inline.
    static constexpr std::size_t serial_cutoff = 4096;

    static bool& in_parallel_region() {
        thread_local bool flag = false;
        return flag;
    }

private:
    ThreadPool() {
        std::size_t w = default_width();
        if (const char* env = std::getenv("TEMO_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) w = static_cast<std::size_t>(v);
        }
        set_width(w);
    }

    ~ThreadPool() {
        {
            std::lock_guard<std::mutex> g(wake_mutex_);
            stop_ = true;
        }
        wake_cv_.notify_all();
        for (auto& t : workers_) t.join();
    }

    static std::size_t default_width() {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }

    void grow_to(std::size_t n_workers) {
        while (workers_.size() < n_workers) {
            const std::size_t lane = workers_.size() + 1; // lane 0 is the caller
            workers_.emplace_back([this, lane] { worker_loop(lane); });
        }
    }

    void worker_loop(std::size_t lane) {
        std::uint64_t seen = 0;
        for (;;) {
            std::unique_lock<std::mutex> g(wake_mutex_);
            wake_cv_.wait(g, [&] { return stop_ || epoch_ != seen; });
            if (stop_) return;
            seen = epoch_;
            const bool mine = lane <= active_lanes_;
            g.unlock();
            if (!mine) continue;
            const std::size_t begin = std::min(lane * chunk_size_, total_);
            const std::size_t end = std::min(begin + chunk_size_, total_);
            if (begin < end) {
                in_parallel_region() = true;
                (*job_)(begin, end);
                in_parallel_region() = false;
            }
            if (lanes_busy_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
                std::lock_guard<std::mutex> d(done_mutex_);
                done_cv_.notify_one();
            }
        }
    }

    std::vector<std::thread> workers_;
    std::mutex run_mutex_;
    std::mutex wake_mutex_;
    std::mutex done_mutex_;
    std::condition_variable wake_cv_;
    std::condition_variable done_cv_;
    std::uint64_t epoch_ = 0;
    std::size_t active_lanes_ = 0;
    bool stop_ = false;
    const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
    std::size_t chunk_size_ = 0;
    std::size_t total_ = 0;
    std::atomic<int> lanes_busy_{0};
    std::size_t width_ = 1;
};

} // namespace detail

inline std::size_t num_threads() { return detail::ThreadPool::instance().width(); }

/// Set the lane count for all kernels (0 restores the hardware default).
inline void set_num_threads(std::size_t n) { detail::ThreadPool::instance().set_width(n); }

/// Run body(begin, end) over a partition of [0, n). The partition never
/// affects results: each index is processed exactly once, independently.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    if (n == 0) return;
    auto& pool = detail::ThreadPool::instance();
    if (pool.width() <= 1 || n < detail::ThreadPool::serial_cutoff ||
        detail::ThreadPool::in_parallel_region()) {
        body(0, n);
        return;
    }
    const std::function<void(std::size_t, std::size_t)> fn = std::forward<F>(body);
    pool.run(n, fn);
}

} // namespace temo
