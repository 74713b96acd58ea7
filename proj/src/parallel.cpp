#include "seqcurl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace seqcurl {

namespace {
thread_local bool in_parallel_region = false;
}

std::size_t thread_limit() {
  std::size_t limit = 0;
  if (const char* env = std::getenv("SEQCURL_THREADS")) {
    try {
      limit = static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      limit = 0;
    }
  }
  if (limit == 0) limit = std::max(1u, std::thread::hardware_concurrency());
  return limit;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(count, thread_limit());
  if (workers <= 1 || in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    in_parallel_region = true;
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
    in_parallel_region = false;
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace seqcurl
