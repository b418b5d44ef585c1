#ifndef EUCSEC_PARALLEL_HPP
#define EUCSEC_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace eucsec {

/// Worker count used by internal loops. Initialized from EUCSEC_THREADS,
/// falling back to the hardware concurrency.
int num_threads();
void set_num_threads(int n);

/// Runs body(i) for i in [0, count). Each index is processed exactly once;
/// callers write results into per-index slots so the outcome never depends
/// on the schedule. Nested calls from inside a worker run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, F&& fn) {
  std::vector<T> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace eucsec

#endif
