#pragma once

#include <utility>

#include <Eigen/Dense>

#include "belldice/correlators.hpp"
#include "belldice/error.hpp"

namespace belldice {

// Numerically exact reference pipeline on a truncated Fock space. Everything
// here is built from first principles (matrix mechanics only) so it shares no
// formulas with the closed-form code it cross-checks.
//
// Every state that arises in this pipeline is real in the Fock basis: the
// source coefficients, beamsplitter amplitudes, and displacement generators
// (real amplitudes) all are. Density operators are therefore real symmetric.

struct TruncatedState {
  int n_max = 0;      // highest Fock level kept per mode
  int mode_count = 1; // 1 or 2
  Eigen::MatrixXd rho;

  int levels() const { return n_max + 1; }
  int dim() const { return mode_count == 2 ? levels() * levels() : levels(); }
  double trace() const { return rho.trace(); }
};

struct OracleConfig {
  int n_max = 20;
  double tail_tol = 1e-12;
  // When set, entry points grow n_max as needed for the requested gain so
  // callers never see truncation artifacts. Turn off to probe truncation
  // behavior deliberately.
  bool auto_raise = true;

  void validate() const;
};

// Smallest n_max whose neglected two-mode-squeezed tail is within tail_tol.
int required_n_max(double g, double tail_tol);

// Two-mode squeezed vacuum at gain g. Errors with truncation-insufficient
// when the discarded tail weight exceeds tail_tol at this n_max.
TruncatedState tmsv_state(double g, const OracleConfig& config);

TruncatedState thermal_state(double n_bar, int n_max);
TruncatedState coherent_state(double amp, int n_max);

// Projects onto "herald detector clicked" (efficiency eta_h on mode 1),
// traces out the herald mode, renormalizes. Returns the conditional state on
// mode 0 and the click probability.
std::pair<TruncatedState, double> herald_condition(const TruncatedState& state,
                                                   double eta_h);

// Isometry of a beamsplitter with transmittance t acting on one occupied
// input port: maps level n to the two-output sector with n total photons.
// Output mode 0 receives the reflected share 1-t.
Eigen::MatrixXd beamsplitter_isometry(double t, int n_max);

TruncatedState beamsplitter_apply(const TruncatedState& state, double t);

// Unitary displacement by a real amplitude, applied in a padded space so the
// truncation edge stays clean; errors if weight reaches the top levels.
TruncatedState displace_apply(const TruncatedState& state, int mode_index,
                              double alpha, double tail_tol = 1e-12);

// Diagonal of the no-click operator for a bare detector of efficiency eta.
Eigen::VectorXd npnr_noclick_operator(int n_max, double eta);

// No-click operator of a displaced detector, conjugated in a padded space
// large enough for the displaced distribution, then cut back to n_max.
Eigen::MatrixXd displaced_noclick_operator(double alpha, double eta, int n_max);

// Full pipeline: source, herald, beamsplitter, one displaced detector per
// arm. Matches the closed-form joint_probabilities.
JointProbabilities oracle_joint_probabilities(const SourceParams& src, double alpha,
                                              double beta, double t, double eta,
                                              const OracleConfig& config);

double oracle_correlator(const SourceParams& src, double alpha, double beta,
                         double t, double eta, const OracleConfig& config);

// Same pipeline minus source and herald: a thermal input straight onto the
// beamsplitter. Cross-checks the thermal closed forms.
JointProbabilities oracle_thermal_joint_probabilities(double n_bar, double alpha,
                                                      double beta, double t,
                                                      double eta,
                                                      const OracleConfig& config);

double oracle_thermal_correlator(double n_bar, double alpha, double beta, double t,
                                 double eta, const OracleConfig& config);

// Herald click probability straight from the truncated pipeline.
double oracle_heralding_probability(const SourceParams& src,
                                    const OracleConfig& config);

}  // namespace belldice
