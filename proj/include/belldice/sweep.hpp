#pragma once

#include <string>
#include <vector>

#include "belldice/optimizer.hpp"

namespace belldice {

// Threshold scan: re-optimize the full parameter set at each detection
// efficiency and record the violation and certified rates.
struct SweepConfig {
  double eta_start = 0.80;
  double eta_stop = 1.00;
  double eta_step = 0.005;
  std::optional<double> eta_h;  // herald follows eta when unset
  double p_dc = 0.0;
  int restarts = 64;
  uint64_t seed = 1;
  double tol = 1e-9;
  int workers = 0;
  // Seed each point with the previous point's optimum (within a worker's
  // contiguous chunk). Results depend on the worker count when enabled, but
  // stay deterministic for a fixed count.
  bool warm_start = true;

  void validate() const;
  std::vector<double> grid() const;
};

struct SweepRecord {
  double eta = 0.0;
  double s_opt = 0.0;
  double g_opt = 0.0;
  double t_opt = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double h_min = 0.0;
  double rate_pump = 0.0;
  double rate_detection = 0.0;
  bool converged = false;
};

std::vector<SweepRecord> run_sweep(const SweepConfig& config);

// csv: header + one row per record, 17 significant digits.
std::string sweep_csv(const std::vector<SweepRecord>& records);
// json: array of objects mirroring the csv fields, in the same order.
std::string sweep_json(const std::vector<SweepRecord>& records);

}  // namespace belldice
