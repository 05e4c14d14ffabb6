#include "anm/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace anm {

void set_jobs(int jobs) {
  omp_set_max_active_levels(1);
  omp_set_num_threads(jobs < 1 ? 1 : jobs);
}

int jobs() { return omp_get_max_threads(); }

int default_jobs() {
  if (const char* env = std::getenv("ANM_JOBS")) {
    try {
      int value = std::stoi(env);
      if (value >= 1) return value;
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace anm
