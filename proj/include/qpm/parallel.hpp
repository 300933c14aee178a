#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace qpm {

// Kahan compensated accumulator; used wherever batch results merge, so the
// reduction is a fixed tree no matter how work was scheduled.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;

  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

// Execution policy for Monte Carlo runs. Threads affect scheduling only:
// results are a function of (seed, sample count) alone, because every sample
// has its own derived stream and batches merge in index order.
struct McPolicy {
  int threads = 1;
  // Batch count; 0 means the default min(50, samples). The batch plan is a
  // function of the sample count only (it shapes the jackknife SEs, never
  // the point estimates).
  int batches = 0;
};

// Near-equal contiguous split of [0, samples) into B batches.
// B = policy.batches or min(50, samples). Returns (start, count) pairs.
std::vector<std::pair<long, long>> batch_plan(long samples, const McPolicy& policy);

// Runs fn(batch_index) for every batch, across up to policy.threads workers.
// fn must write only to its own batch slot.
void for_each_batch(int num_batches, const McPolicy& policy,
                    const std::function<void(int)>& fn);

}  // namespace qpm
