#pragma once

#include "belldice/error.hpp"

namespace belldice {

// Pair source pumped at gain g, heralded by a detector of efficiency eta_h
// that also fires spuriously with probability p_dc per trial.
struct SourceParams {
  double g = 0.1;
  double eta_h = 1.0;
  double p_dc = 0.0;

  double tanh_g() const;
  void validate() const;
};

// The heralded single-mode state equals a weighted difference of two thermal
// states: c_plus * thermal(n1_bar) - c_minus * thermal(n2_bar). Any linear
// detection functional therefore evaluates on thermal inputs only.
struct HeraldedStateWeights {
  double c_plus = 1.0;
  double c_minus = 0.0;
  double n1_bar = 0.0;
  double n2_bar = 0.0;
};

// One Bell trial: split the heralded mode on a beamsplitter with
// transmittance t, displace each output arm (real amplitudes), detect with
// efficiency eta on both sides.
struct MeasurementSettings {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double t = 0.5;
  double eta = 1.0;

  void validate() const;
};

// Outcome table for one setting pair; rows sum to 1 by construction.
struct JointProbabilities {
  double p_nc_nc = 0.0;
  double p_nc_c = 0.0;
  double p_c_nc = 0.0;
  double p_c_c = 0.0;
};

HeraldedStateWeights heralded_weights(const SourceParams& src);

double heralding_probability(const SourceParams& src);

// Joint no-click probability when a thermal state of mean photon number
// n_bar is split (reflectance 1-t to the alpha arm) and both displaced
// detectors stay silent.
double thermal_no_click_joint(double n_bar, double alpha, double beta, double t,
                              double eta);

// E = <A B> for a thermal input, outcomes +1 (no click) / -1 (click).
double thermal_correlator(double n_bar, double alpha, double beta, double t,
                          double eta);

double correlator(const SourceParams& src, double alpha, double beta, double t,
                  double eta);

JointProbabilities joint_probabilities(const SourceParams& src, double alpha,
                                       double beta, double t, double eta);

// Herald-conditioned correlator when false heralds (probability p_dc on
// trials with no detected pair) mix in the unheralded arm state.
double dark_count_adjusted_correlator(const SourceParams& src, double alpha,
                                      double beta, double t, double eta);

// Signed setting combination E11 + E12 + E21 - E22; uses the dark-count
// model automatically when src.p_dc > 0.
double chsh_sum(const SourceParams& src, const MeasurementSettings& s);

double chsh_value(const SourceParams& src, const MeasurementSettings& s);

// Rescaled form: ch = (chsh - 2) / 4, positive exactly when CHSH > 2.
double ch_value(const SourceParams& src, const MeasurementSettings& s);

}  // namespace belldice
