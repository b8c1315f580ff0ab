#pragma once

#include <functional>

namespace invman {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled by exactly one worker, so results written per index are
/// independent of the thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace invman
