#pragma once

#include <cstddef>
#include <functional>

namespace dimscope {

/// Worker count used by parallel loops. 0 selects hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(i) for i in [begin, end). Iterations must be independent;
/// results must be written to per-index slots so the outcome does not
/// depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace dimscope
