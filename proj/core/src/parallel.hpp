#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace flagcert::detail {

// Runs f(i) for i in [0, n) on up to `threads` workers with a static
// strided split. Results must be written to per-index slots so that the
// outcome does not depend on scheduling. The exception of the smallest
// failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  const unsigned t = threads == 0 ? 1u : threads;
  if (t == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(t, n));
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace flagcert::detail
