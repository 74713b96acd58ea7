#pragma once

#include <cstddef>
#include <functional>

namespace seqcurl {

/// Worker cap from SEQCURL_THREADS (0 or unset = hardware concurrency).
std::size_t thread_limit();

/// Runs body(i) for i in [0, count). Calls nested inside another parallel_for
/// run serially. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace seqcurl
