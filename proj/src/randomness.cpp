#include "belldice/randomness.hpp"

#include <cmath>
#include <numbers>

#include "belldice/format.hpp"

namespace belldice {

double min_entropy(double s) {
  // Allow a hair above 2*sqrt(2) so optimizer output at the Tsirelson point
  // is not rejected for last-bit rounding.
  constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;
  if (!(s >= 0.0) || s > kTsirelson + 1e-9) {
    raise(ErrorKind::kInvalidParameter,
          "CHSH value must lie in [0, 2*sqrt(2)], got " + format_g17(s));
  }
  if (s <= 2.0) return 0.0;
  const double root = std::sqrt(std::max(0.0, 2.0 - s * s / 4.0));
  return 1.0 - std::log2(1.0 + root);
}

double rate_pump_limited(const SourceParams& src, double s) {
  return heralding_probability(src) * min_entropy(s);
}

double rate_detection_limited(double s) { return min_entropy(s); }

}  // namespace belldice
