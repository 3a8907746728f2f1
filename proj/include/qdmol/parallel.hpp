#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace qdmol {

// Worker count: QDMOL_NUM_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_count();

// Calls body(i) for i in [0, n) across thread_count() workers in contiguous
// chunks. Bodies must write only to their own slots; reductions happen after.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Neumaier compensated summation.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace qdmol
