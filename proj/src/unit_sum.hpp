#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>

namespace compreg::detail {

// Adjusts a nonnegative vector whose sum is within a few ulps of 1 so that
// left-to-right accumulation yields exactly 1.0. Folding the residual into
// the largest entry usually lands in a pass or two (it is at least 1/len, so
// the tiny adjustment cannot push it negative), but intermediate rounding can
// put exact 1.0 out of that one entry's reach: stepping it a single ulp can
// hop the accumulated total straight over 1.0. Rebuilding the last nonzero
// entry from its prefix sum then closes the gap, since fl(a + fl(1 - a)) is
// exactly 1.0 for any a in [0, 1) and trailing zeros add without rounding.
// Zero entries are never touched, so the support is preserved.
inline void pin_unit_sum(double* p, std::size_t len) {
  double* top = std::max_element(p, p + len);
  for (int pass = 0; pass < 4; ++pass) {
    const double s = std::accumulate(p, p + len, 0.0);
    if (s == 1.0) return;
    *top += 1.0 - s;
  }
  std::size_t m = len;
  while (m > 0 && p[m - 1] == 0.0) --m;
  if (m == 0) return;
  const double prefix = std::accumulate(p, p + (m - 1), 0.0);
  const double rebuilt = 1.0 - prefix;
  if (rebuilt > 0.0) p[m - 1] = rebuilt;
}

}  // namespace compreg::detail
