/**
 * @file runner.cpp
 */
#include "uavsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "uavsim/simulation.hpp"

namespace uavsim {

MetricsReport run_scenario(const ScenarioConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const RunContext ctx = RunContext::make(cfg);
  MetricsReport merged;
  if (cfg.drops == 0) return merged;

  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, cfg.drops);

  std::atomic<int> next{0};
  std::mutex mu;
  std::map<int, MetricsReport> pending;
  int merged_upto = 0;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      const int d = next.fetch_add(1);
      if (d >= cfg.drops) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      try {
        MetricsReport r = simulate_drop(cfg, ctx, d);
        std::lock_guard<std::mutex> lock(mu);
        pending.emplace(d, std::move(r));
        while (!pending.empty() && pending.begin()->first == merged_upto) {
          merged.merge(pending.begin()->second);
          pending.erase(pending.begin());
          ++merged_upto;
          if (progress) progress(merged_upto, cfg.drops);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return merged;
}

MetricsReport run_to_directory(const ScenarioConfig& cfg, const std::string& out_dir,
                               const ProgressFn& progress) {
  MetricsReport r = run_scenario(cfg, progress);
  write_outputs(out_dir, r, cfg.metrics.output_options(), cfg.to_json());
  return r;
}

}  // namespace uavsim
