#ifndef MLDP_EXECUTION_HPP
#define MLDP_EXECUTION_HPP

#include <cstddef>
#include <cstdint>
#include <functional>

namespace mldp {

/// Resource caps shared by every operation that materializes the monoid.
struct Budget {
  std::uint64_t max_elements = 200'000'000;
  std::uint64_t max_limit_general = 10'000'000;
  std::uint64_t max_limit_integers = 100'000'000;
  std::uint64_t max_tuples = 100'000'000;
};

struct ExecutionOptions {
  unsigned threads = 0;  // 0 means hardware concurrency
  Budget budget{};

  unsigned resolved_threads() const noexcept;
};

// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks are
// claimed in index order; body must only write to slot i of its output.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace mldp

#endif  // MLDP_EXECUTION_HPP
