#pragma once

#include <cstddef>

namespace btv {

/// Number of OpenMP workers used by the parallel kernels. 0 restores the
/// runtime default. Kernel results never depend on this value.
void set_worker_count(int workers);
int worker_count();

/// Reductions over floating point are split into this many fixed chunks and
/// combined in chunk order, so sums do not depend on the worker count.
inline constexpr std::size_t kReductionChunks = 64;

}  // namespace btv
