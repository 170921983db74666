#include "belldice/correlators.hpp"

#include <cmath>

#include "belldice/format.hpp"

namespace belldice {
namespace {

bool finite(double v) { return std::isfinite(v); }

void check_thermal_args(double n_bar, double alpha, double beta, double t, double eta) {
  if (!(n_bar >= 0.0) || !finite(n_bar)) {
    raise(ErrorKind::kInvalidParameter,
          "thermal mean photon number must be finite and >= 0, got " + format_g17(n_bar));
  }
  if (!(t > 0.0 && t < 1.0)) {
    raise(ErrorKind::kInvalidParameter,
          "beamsplitter transmittance must lie in (0, 1), got " + format_g17(t));
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    raise(ErrorKind::kInvalidParameter,
          "detector efficiency must lie in (0, 1], got " + format_g17(eta));
  }
  if (!finite(alpha) || !finite(beta)) {
    raise(ErrorKind::kInvalidParameter, "displacements must be finite");
  }
}

// Reflected share 1-t feeds the alpha arm, transmitted share t the beta arm.
double no_click_joint(double n_bar, double alpha, double beta, double t, double eta) {
  const double r = 1.0 - t;
  const double u = std::sqrt(r) * alpha + std::sqrt(t) * beta;
  const double gain = n_bar * eta * eta / (1.0 + n_bar * eta);
  return std::exp(-eta * (alpha * alpha + beta * beta) + gain * u * u) /
         (1.0 + eta * n_bar);
}

double no_click_single(double n_bar_arm_share, double amp, double eta) {
  const double d = 1.0 + eta * n_bar_arm_share;
  return std::exp(-eta * amp * amp / d) / d;
}

double correlator_unchecked(double n_bar, double alpha, double beta, double t,
                            double eta) {
  const double pj = no_click_joint(n_bar, alpha, beta, t, eta);
  const double pa = no_click_single(n_bar * (1.0 - t), alpha, eta);
  const double pb = no_click_single(n_bar * t, beta, eta);
  return 1.0 + 4.0 * pj - 2.0 * pa - 2.0 * pb;
}

}  // namespace

double SourceParams::tanh_g() const { return std::tanh(g); }

void SourceParams::validate() const {
  if (!(g > 0.0) || !finite(g)) {
    raise(ErrorKind::kInvalidSource, "gain must be finite and > 0, got " + format_g17(g));
  }
  if (!(eta_h > 0.0 && eta_h <= 1.0)) {
    raise(ErrorKind::kInvalidSource,
          "herald efficiency must lie in (0, 1], got " + format_g17(eta_h));
  }
  if (!(p_dc >= 0.0 && p_dc < 1.0)) {
    raise(ErrorKind::kInvalidSource,
          "dark-count probability must lie in [0, 1), got " + format_g17(p_dc));
  }
}

void MeasurementSettings::validate() const {
  if (!(t > 0.0 && t < 1.0)) {
    raise(ErrorKind::kInvalidParameter,
          "beamsplitter transmittance must lie in (0, 1), got " + format_g17(t));
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    raise(ErrorKind::kInvalidParameter,
          "detector efficiency must lie in (0, 1], got " + format_g17(eta));
  }
  if (!finite(alpha1) || !finite(alpha2) || !finite(beta1) || !finite(beta2)) {
    raise(ErrorKind::kInvalidParameter, "displacements must be finite");
  }
}

HeraldedStateWeights heralded_weights(const SourceParams& src) {
  src.validate();
  const double tg = src.tanh_g();
  const double tg2 = tg * tg;
  const double rh2 = 1.0 - src.eta_h;  // herald non-detection probability per photon

  HeraldedStateWeights w;
  w.c_plus = (1.0 - rh2 * tg2) / (tg2 * src.eta_h);
  // Unit trace pins c_minus; subtracting keeps the identity exact in floats,
  // unlike evaluating its own closed form.
  w.c_minus = w.c_plus - 1.0;
  const double sh = std::sinh(src.g);
  w.n1_bar = sh * sh;
  w.n2_bar = rh2 * tg2 / (1.0 - rh2 * tg2);
  return w;
}

double heralding_probability(const SourceParams& src) {
  src.validate();
  const double tg2 = src.tanh_g() * src.tanh_g();
  return src.eta_h * tg2 / (1.0 - (1.0 - src.eta_h) * tg2);
}

double thermal_no_click_joint(double n_bar, double alpha, double beta, double t,
                              double eta) {
  check_thermal_args(n_bar, alpha, beta, t, eta);
  return no_click_joint(n_bar, alpha, beta, t, eta);
}

double thermal_correlator(double n_bar, double alpha, double beta, double t,
                          double eta) {
  check_thermal_args(n_bar, alpha, beta, t, eta);
  return correlator_unchecked(n_bar, alpha, beta, t, eta);
}

double correlator(const SourceParams& src, double alpha, double beta, double t,
                  double eta) {
  check_thermal_args(0.0, alpha, beta, t, eta);
  const HeraldedStateWeights w = heralded_weights(src);
  return w.c_plus * correlator_unchecked(w.n1_bar, alpha, beta, t, eta) -
         w.c_minus * correlator_unchecked(w.n2_bar, alpha, beta, t, eta);
}

JointProbabilities joint_probabilities(const SourceParams& src, double alpha,
                                       double beta, double t, double eta) {
  check_thermal_args(0.0, alpha, beta, t, eta);
  const HeraldedStateWeights w = heralded_weights(src);

  auto mix = [&](double f1, double f2) { return w.c_plus * f1 - w.c_minus * f2; };
  const double pj = mix(no_click_joint(w.n1_bar, alpha, beta, t, eta),
                        no_click_joint(w.n2_bar, alpha, beta, t, eta));
  const double pa = mix(no_click_single(w.n1_bar * (1.0 - t), alpha, eta),
                        no_click_single(w.n2_bar * (1.0 - t), alpha, eta));
  const double pb = mix(no_click_single(w.n1_bar * t, beta, eta),
                        no_click_single(w.n2_bar * t, beta, eta));

  JointProbabilities p;
  p.p_nc_nc = pj;
  p.p_nc_c = pa - pj;
  p.p_c_nc = pb - pj;
  p.p_c_c = 1.0 - pa - pb + pj;  // unit sum holds exactly
  return p;
}

double dark_count_adjusted_correlator(const SourceParams& src, double alpha,
                                      double beta, double t, double eta) {
  check_thermal_args(0.0, alpha, beta, t, eta);
  const HeraldedStateWeights w = heralded_weights(src);
  const double e_heralded = w.c_plus * correlator_unchecked(w.n1_bar, alpha, beta, t, eta) -
                            w.c_minus * correlator_unchecked(w.n2_bar, alpha, beta, t, eta);
  if (src.p_dc == 0.0) return e_heralded;

  // A false herald passes the unheralded arm state through, which is thermal
  // with the same mean occupation n2_bar as the subtracted component.
  const double p_h = heralding_probability(src);
  const double p_false = (1.0 - p_h) * src.p_dc;
  const double e_false = correlator_unchecked(w.n2_bar, alpha, beta, t, eta);
  return (p_h * e_heralded + p_false * e_false) / (p_h + p_false);
}

double chsh_sum(const SourceParams& src, const MeasurementSettings& s) {
  src.validate();
  s.validate();
  const HeraldedStateWeights w = heralded_weights(src);
  const double p_h = heralding_probability(src);
  const double p_false = (1.0 - p_h) * src.p_dc;

  auto corr = [&](double a, double b) {
    const double e2 = correlator_unchecked(w.n2_bar, a, b, s.t, s.eta);
    double e = w.c_plus * correlator_unchecked(w.n1_bar, a, b, s.t, s.eta) -
               w.c_minus * e2;
    if (p_false > 0.0) e = (p_h * e + p_false * e2) / (p_h + p_false);
    return e;
  };

  return corr(s.alpha1, s.beta1) + corr(s.alpha1, s.beta2) +
         corr(s.alpha2, s.beta1) - corr(s.alpha2, s.beta2);
}

double chsh_value(const SourceParams& src, const MeasurementSettings& s) {
  return std::abs(chsh_sum(src, s));
}

double ch_value(const SourceParams& src, const MeasurementSettings& s) {
  return (chsh_value(src, s) - 2.0) / 4.0;
}

}  // namespace belldice
