#pragma once

#include "belldice/correlators.hpp"

namespace belldice {

// Certified min-entropy per trial against a quantum adversary, as a function
// of the observed CHSH value. Zero at or below the classical bound, one bit
// at the Tsirelson point.
double min_entropy(double s);

// Bits per pump pulse: every trial counts, heralded or not.
double rate_pump_limited(const SourceParams& src, double s);

// Bits per heralded trial.
double rate_detection_limited(double s);

}  // namespace belldice
