#pragma once

#include <chrono>
#include <cstddef>

namespace elmkit {

/// Wall-clock profile of one training run. Batch times cover hidden-layer
/// computation plus normal-equation accumulation only; parsing and the
/// final solve are excluded from the per-batch mean but included in total.
struct TimingReport {
    double total_seconds = 0.0;
    double batch_seconds_mean = 0.0;
    std::size_t batches = 0;
    std::size_t instances = 0;
    double instances_per_second = 0.0;

    void finish(double total, double batch_sum, std::size_t n_batches, std::size_t n_instances) {
        total_seconds = total;
        batches = n_batches;
        instances = n_instances;
        batch_seconds_mean = n_batches > 0 ? batch_sum / double(n_batches) : 0.0;
        instances_per_second = total > 0.0 ? double(n_instances) / total : 0.0;
    }
};

/// Monotonic stopwatch.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace elmkit
