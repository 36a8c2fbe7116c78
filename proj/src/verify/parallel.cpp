#include "sketch_sfa/verify/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sketch_sfa::verify {

std::size_t worker_count(std::size_t tasks) {
  std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SKETCH_SFA_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) workers = std::min(workers, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // Unparsable values leave the hardware default in place.
    }
  }
  return std::max<std::size_t>(1, std::min(workers, tasks));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count && !stop; i = next++) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sketch_sfa::verify
