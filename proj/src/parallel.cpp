#include "fkpath/parallel.hpp"

#include <cstdlib>
#include <string>

namespace fkpath {

int resolve_thread_count(int requested) {
  if (const char* env = std::getenv("FKPATH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace fkpath
