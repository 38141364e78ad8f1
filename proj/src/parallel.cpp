#include "tacf/parallel.hpp"

#include <omp.h>

namespace tacf {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return omp_get_max_threads();
}

}  // namespace tacf
