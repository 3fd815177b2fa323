#include "fdstokes/parallel.hpp"

#include <omp.h>

namespace fdstokes {

void set_thread_count(int threads) {
  if (threads >= 1) omp_set_num_threads(threads);
}

int max_thread_count() { return omp_get_max_threads(); }

}  // namespace fdstokes
