#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "belldice/correlators.hpp"

namespace belldice {

// Search box, parameter order: g, t, alpha1, alpha2, beta1, beta2.
// A dimension with lo == hi is frozen at that value.
struct ParameterBounds {
  std::array<double, 6> lo{1e-4, 0.05, -3.0, -3.0, -3.0, -3.0};
  std::array<double, 6> hi{1.0, 0.95, 3.0, 3.0, 3.0, 3.0};

  void validate() const;
};

struct OptimalParams {
  double g = 0.1;
  double t = 0.5;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;

  std::array<double, 6> to_array() const;
  static OptimalParams from_array(const std::array<double, 6>& x);
  SourceParams source(double eta_h, double p_dc) const;
  MeasurementSettings settings(double eta) const;
};

// Fixed relabeling of each party's outcomes, chosen before any trial. Only
// the product s_a * s_b enters the CHSH sum.
struct OutcomeStrategy {
  int s_a = 1;
  int s_b = 1;
};

struct OptimizationProblem {
  double eta = 1.0;
  std::optional<double> eta_h;  // herald detector; defaults to eta
  double p_dc = 0.0;
  ParameterBounds bounds;
  int restarts = 64;
  uint64_t seed = 1;
  double tol = 1e-9;
  int workers = 0;
  // Extra starting points tried alongside the quasirandom set.
  std::vector<std::array<double, 6>> warm_starts;

  double herald_efficiency() const { return eta_h.value_or(eta); }
  void validate() const;
};

struct OptimizationResult {
  double s_opt = 0.0;
  OptimalParams params;
  OutcomeStrategy strategy;
  bool converged = false;
  long evaluations = 0;
};

// Maximizes |E11 + E12 + E21 - E22| over source and measurement parameters.
// Deterministic for a fixed seed, independent of the worker count.
OptimizationResult optimize_chsh(const OptimizationProblem& problem);

// Optimizes the violation reachable under a fixed outcome relabeling.
// Relabeling scales every correlator by s_a * s_b, so the attainable
// violation is the same for all four assignments; the run reports the
// optimum found when searching under that labeling.
OptimizationResult optimize_with_assignment(const OptimizationProblem& problem,
                                            OutcomeStrategy strategy);

struct StrategyOptimum {
  OutcomeStrategy strategy;
  double value = 0.0;
  OptimalParams params;
};

// Optima under all four fixed sign assignments. The physical claim under
// test: every assignment reaches the same violation. Each assignment is
// searched with its own derived seed, so agreement also certifies that the
// multistart is not getting lucky with one particular start set.
struct StrategyEquivalenceReport {
  std::array<StrategyOptimum, 4> optima;
  double max_spread() const;
};

StrategyEquivalenceReport strategy_equivalence_check(const OptimizationProblem& problem);

struct EtaBracket {
  double lo = 0.70;
  double hi = 1.00;
};

// Smallest detection efficiency with an optimized violation, by bisection.
// The bracket must straddle the threshold: no violation at lo, violation at
// hi. Herald efficiency follows eta unless pinned in the problem.
double find_eta_min(const OptimizationProblem& base, EtaBracket bracket = {},
                    double tol = 1e-3);

}  // namespace belldice
