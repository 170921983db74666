#pragma once

#include <cstdint>
#include <string>

#include "belldice/fock_oracle.hpp"

namespace belldice {

// Randomized agreement check between the closed-form pipeline and the
// truncated Fock-space oracle over the physically interesting region.
struct EquivalenceOptions {
  int samples = 100;
  uint64_t seed = 1;
  double tol = 1e-8;
  OracleConfig oracle;
  int workers = 0;
};

struct EquivalenceSample {
  double g = 0.0;
  double eta_h = 0.0;
  double t = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct EquivalenceReport {
  int samples = 0;
  double max_correlator_dev = 0.0;
  double max_joint_dev = 0.0;
  int truncation_failures = 0;
  EquivalenceSample worst;

  bool passed(double tol) const {
    return truncation_failures == 0 && max_correlator_dev <= tol && max_joint_dev <= tol;
  }
  std::string summary(double tol) const;
};

// Draws parameters from fixed ranges, deterministic per (seed, index), so the
// result is identical for any worker count.
EquivalenceReport run_oracle_equivalence(const EquivalenceOptions& options);

}  // namespace belldice
