#include "qpm/parallel.hpp"

#include <algorithm>

#include "qpm/errors.hpp"

namespace qpm {

std::vector<std::pair<long, long>> batch_plan(long samples, const McPolicy& policy) {
  if (samples < 0) throw invalid_input("batch plan: negative sample count");
  std::vector<std::pair<long, long>> plan;
  if (samples == 0) return plan;
  long b = policy.batches > 0 ? policy.batches : std::min<long>(50, samples);
  b = std::min(b, samples);
  const long base = samples / b;
  const long extra = samples % b;
  long start = 0;
  for (long i = 0; i < b; ++i) {
    const long count = base + (i < extra ? 1 : 0);
    plan.emplace_back(start, count);
    start += count;
  }
  return plan;
}

void for_each_batch(int num_batches, const McPolicy& policy,
                    const std::function<void(int)>& fn) {
  const int threads = std::max(1, std::min(policy.threads, num_batches));
  if (threads == 1) {
    for (int b = 0; b < num_batches; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  auto worker = [&]() {
    for (;;) {
      const int b = next.fetch_add(1);
      if (b >= num_batches) return;
      fn(b);
    }
  };
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace qpm
