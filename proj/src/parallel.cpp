#include "btv/parallel.hpp"

#include <omp.h>

namespace btv {

namespace {
int default_workers() {
  static const int workers = omp_get_max_threads();
  return workers;
}
}  // namespace

void set_worker_count(int workers) {
  const int base = default_workers();
  omp_set_num_threads(workers > 0 ? workers : base);
}

int worker_count() { return omp_get_max_threads(); }

}  // namespace btv
