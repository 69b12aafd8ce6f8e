#pragma once

#include <cstddef>
#include <functional>

namespace rulemine {

// Runs fn(0..count-1) on up to `workers` threads pulling indices from a
// shared atomic counter. Blocks until every task finished; the first task
// exception is rethrown after all threads joined. Tasks must not touch
// shared mutable state.
void run_parallel(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace rulemine
