#include "belldice/fock_oracle.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "belldice/format.hpp"

namespace belldice {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Memory ceilings for automatic truncation growth. The two-mode source state
// costs (n+1)^4 doubles, the single-mode thermal pipeline only (n+1)^2.
constexpr int kMaxAutoTwoMode = 50;
constexpr int kMaxAutoSingleMode = 120;

int geometric_tail_levels(double ratio, double tail_tol) {
  // Discarded weight of a geometric distribution above level n is ratio^(n+1).
  if (ratio <= 0.0) return 1;
  const int n = static_cast<int>(std::ceil(std::log(tail_tol) / std::log(ratio))) - 1;
  return std::max(n, 1);
}

void check_detector(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    raise(ErrorKind::kInvalidEfficiency,
          "detector efficiency must lie in [0, 1], got " + format_g17(eta));
  }
}

void check_levels(int n_max) {
  if (n_max < 1) {
    raise(ErrorKind::kInvalidParameter, "n_max must be >= 1");
  }
}

// exp(alpha (a^dag - a)) on a dim-level space; real orthogonal.
Eigen::MatrixXd displacement_matrix(double alpha, int dim) {
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    const double s = alpha * std::sqrt(static_cast<double>(n + 1));
    gen(n + 1, n) = s;
    gen(n, n + 1) = -s;
  }
  return gen.exp();
}

// M = V^T (A (x) B) V computed one isometry column at a time: column m
// reshaped row-major is W_m, and (A (x) B) vec(W) = vec(A W B^T).
Eigen::MatrixXd sandwich_two_mode(const Eigen::MatrixXd& V, const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B) {
  const int d = static_cast<int>(V.cols());
  const Eigen::MatrixXd bt = B.transpose();
  Eigen::MatrixXd z(d * d, d);
  for (int m = 0; m < d; ++m) {
    Eigen::Map<const RowMajor> w(V.col(m).data(), d, d);
    Eigen::Map<RowMajor> zm(z.col(m).data(), d, d);
    zm = A * (w * bt);
  }
  return V.transpose() * z;
}

double expectation(const Eigen::MatrixXd& rho, const Eigen::MatrixXd& op) {
  return rho.cwiseProduct(op).sum();  // both symmetric
}

struct PipelineOps {
  Eigen::MatrixXd joint;       // V^T (A (x) B) V
  Eigen::MatrixXd alice_only;  // V^T (A (x) 1) V
  Eigen::MatrixXd bob_only;    // V^T (1 (x) B) V
};

PipelineOps build_pipeline_ops(double alpha, double beta, double t, double eta,
                               int n_max) {
  const int d = n_max + 1;
  const Eigen::MatrixXd v = beamsplitter_isometry(t, n_max);
  const Eigen::MatrixXd a = displaced_noclick_operator(alpha, eta, n_max);
  const Eigen::MatrixXd b = displaced_noclick_operator(beta, eta, n_max);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  return {sandwich_two_mode(v, a, b), sandwich_two_mode(v, a, id),
          sandwich_two_mode(v, id, b)};
}

JointProbabilities table_from_noclick(double pj, double pa, double pb) {
  JointProbabilities p;
  p.p_nc_nc = pj;
  p.p_nc_c = pa - pj;
  p.p_c_nc = pb - pj;
  p.p_c_c = 1.0 - pa - pb + pj;
  return p;
}

void check_measurement_args(double alpha, double beta, double t, double eta) {
  if (!(t > 0.0 && t < 1.0)) {
    raise(ErrorKind::kInvalidParameter,
          "beamsplitter transmittance must lie in (0, 1), got " + format_g17(t));
  }
  check_detector(eta);
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    raise(ErrorKind::kInvalidParameter, "displacements must be finite");
  }
}

}  // namespace

void OracleConfig::validate() const {
  check_levels(n_max);
  if (!(tail_tol > 0.0) || !std::isfinite(tail_tol)) {
    raise(ErrorKind::kInvalidParameter, "tail tolerance must be finite and > 0");
  }
}

int required_n_max(double g, double tail_tol) {
  const double tg = std::tanh(g);
  return geometric_tail_levels(tg * tg, tail_tol);
}

TruncatedState tmsv_state(double g, const OracleConfig& config) {
  config.validate();
  if (!(g > 0.0) || !std::isfinite(g)) {
    raise(ErrorKind::kInvalidSource, "gain must be finite and > 0, got " + format_g17(g));
  }
  const double tg = std::tanh(g);
  const double tail = std::pow(tg, 2.0 * (config.n_max + 1));
  if (tail > config.tail_tol) {
    raise(ErrorKind::kTruncationInsufficient,
          "two-mode squeezed tail " + format_g17(tail) + " at n_max=" +
              std::to_string(config.n_max) + " exceeds " + format_g17(config.tail_tol) +
              "; need n_max >= " + std::to_string(required_n_max(g, config.tail_tol)));
  }

  const int d = config.n_max + 1;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(d * d);
  const double norm = std::sqrt(1.0 - tg * tg);
  for (int k = 0; k < d; ++k) psi[k * d + k] = norm * std::pow(tg, k);

  TruncatedState state;
  state.n_max = config.n_max;
  state.mode_count = 2;
  state.rho = psi * psi.transpose();
  return state;
}

TruncatedState thermal_state(double n_bar, int n_max) {
  check_levels(n_max);
  if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) {
    raise(ErrorKind::kInvalidParameter,
          "thermal mean photon number must be finite and >= 0, got " + format_g17(n_bar));
  }
  const double q = n_bar / (1.0 + n_bar);
  const int d = n_max + 1;
  TruncatedState state;
  state.n_max = n_max;
  state.mode_count = 1;
  state.rho = Eigen::MatrixXd::Zero(d, d);
  for (int n = 0; n < d; ++n) state.rho(n, n) = (1.0 - q) * std::pow(q, n);
  return state;
}

TruncatedState coherent_state(double amp, int n_max) {
  check_levels(n_max);
  if (!std::isfinite(amp)) {
    raise(ErrorKind::kInvalidAmplitude, "coherent amplitude must be finite");
  }
  const int d = n_max + 1;
  Eigen::VectorXd psi(d);
  psi[0] = std::exp(-0.5 * amp * amp);
  for (int n = 1; n < d; ++n) psi[n] = psi[n - 1] * amp / std::sqrt(static_cast<double>(n));
  TruncatedState state;
  state.n_max = n_max;
  state.mode_count = 1;
  state.rho = psi * psi.transpose();
  return state;
}

std::pair<TruncatedState, double> herald_condition(const TruncatedState& state,
                                                   double eta_h) {
  if (state.mode_count != 2) {
    raise(ErrorKind::kInvalidParameter, "herald conditioning needs a two-mode state");
  }
  if (!(eta_h > 0.0 && eta_h <= 1.0)) {
    raise(ErrorKind::kInvalidEfficiency,
          "herald efficiency must lie in (0, 1], got " + format_g17(eta_h));
  }
  const int d = state.levels();

  // click weight on k herald photons: 1 - (1 - eta_h)^k
  Eigen::VectorXd w(d);
  for (int k = 0; k < d; ++k) w[k] = 1.0 - std::pow(1.0 - eta_h, k);

  Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += state.rho(i * d + k, j * d + k) * w[k];
      reduced(i, j) = acc;
    }
  }

  const double p_click = reduced.trace();
  if (p_click < 1e-300) {
    raise(ErrorKind::kZeroProbabilityCondition,
          "herald click probability vanishes; conditioning undefined");
  }
  TruncatedState out;
  out.n_max = state.n_max;
  out.mode_count = 1;
  out.rho = reduced / p_click;
  return {out, p_click};
}

Eigen::MatrixXd beamsplitter_isometry(double t, int n_max) {
  check_levels(n_max);
  if (!(t > 0.0 && t < 1.0)) {
    raise(ErrorKind::kInvalidParameter,
          "beamsplitter transmittance must lie in (0, 1), got " + format_g17(t));
  }
  const int d = n_max + 1;
  const double r = 1.0 - t;
  const double ratio = std::sqrt(r / t);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d * d, d);
  for (int n = 0; n < d; ++n) {
    // amplitude sqrt(C(n,k) r^k t^(n-k)) onto |k, n-k>, built by recurrence
    // to avoid overflowing binomials
    double amp = std::pow(t, 0.5 * n);
    for (int k = 0; k <= n; ++k) {
      v(k * d + (n - k), n) = amp;
      if (k < n) amp *= ratio * std::sqrt(static_cast<double>(n - k) / (k + 1));
    }
  }
  return v;
}

TruncatedState beamsplitter_apply(const TruncatedState& state, double t) {
  if (state.mode_count != 1) {
    raise(ErrorKind::kInvalidParameter, "beamsplitter input must be single-mode");
  }
  const Eigen::MatrixXd v = beamsplitter_isometry(t, state.n_max);
  TruncatedState out;
  out.n_max = state.n_max;
  out.mode_count = 2;
  out.rho = v * state.rho * v.transpose();
  return out;
}

TruncatedState displace_apply(const TruncatedState& state, int mode_index,
                              double alpha, double tail_tol) {
  if (mode_index < 0 || mode_index >= state.mode_count) {
    raise(ErrorKind::kInvalidParameter, "mode index out of range");
  }
  if (!std::isfinite(alpha)) {
    raise(ErrorKind::kInvalidAmplitude, "displacement must be finite");
  }
  const int d = state.levels();
  const int dp = d + 10;
  const Eigen::MatrixXd disp = displacement_matrix(alpha, dp);

  // Element access through the (displaced, spectator) index split; the state
  // itself is laid out with mode 0 as the major index.
  const int spectator = state.mode_count == 2 ? d : 1;
  auto flat = [&](int disp_idx, int spec_idx) -> long {
    if (state.mode_count == 1) return disp_idx;
    return mode_index == 0 ? (long)disp_idx * d + spec_idx
                           : (long)spec_idx * d + disp_idx;
  };

  // One padded block per spectator index pair, conjugated independently.
  std::vector<Eigen::MatrixXd> moved((size_t)spectator * spectator);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(dp, dp);
  for (int bi = 0; bi < spectator; ++bi) {
    for (int bj = 0; bj < spectator; ++bj) {
      block.setZero();
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) block(i, j) = state.rho(flat(i, bi), flat(j, bj));
      }
      moved[(size_t)bi * spectator + bj] = disp * block * disp.transpose();
    }
  }

  // Weight reaching the top two padded levels means even the padded space
  // was too small for this displacement.
  double top_mass = 0.0;
  for (int bi = 0; bi < spectator; ++bi) {
    const Eigen::MatrixXd& m = moved[(size_t)bi * spectator + bi];
    top_mass += m(dp - 2, dp - 2) + m(dp - 1, dp - 1);
  }
  if (top_mass > tail_tol) {
    raise(ErrorKind::kTruncationInsufficient,
          "displaced weight " + format_g17(top_mass) +
              " reached the padded truncation edge; raise n_max");
  }

  TruncatedState out;
  out.n_max = state.n_max;
  out.mode_count = state.mode_count;
  out.rho = Eigen::MatrixXd::Zero(state.rho.rows(), state.rho.cols());
  for (int bi = 0; bi < spectator; ++bi) {
    for (int bj = 0; bj < spectator; ++bj) {
      const Eigen::MatrixXd& m = moved[(size_t)bi * spectator + bj];
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out.rho(flat(i, bi), flat(j, bj)) = m(i, j);
      }
    }
  }
  return out;
}

Eigen::VectorXd npnr_noclick_operator(int n_max, double eta) {
  check_levels(n_max);
  check_detector(eta);
  Eigen::VectorXd diag(n_max + 1);
  for (int n = 0; n <= n_max; ++n) diag[n] = std::pow(1.0 - eta, n);
  return diag;
}

Eigen::MatrixXd displaced_noclick_operator(double alpha, double eta, int n_max) {
  check_levels(n_max);
  check_detector(eta);
  if (!std::isfinite(alpha)) {
    raise(ErrorKind::kInvalidAmplitude, "displacement must be finite");
  }
  // The conjugated operator needs room for the displaced distribution of the
  // highest kept level, roughly (sqrt(n_max) + |alpha|)^2.
  const double reach = std::sqrt(static_cast<double>(n_max)) + std::abs(alpha);
  const int padded = std::max(n_max + 10, static_cast<int>(std::ceil(reach * reach)) + 15);
  const Eigen::MatrixXd disp = displacement_matrix(alpha, padded + 1);
  const Eigen::VectorXd k = npnr_noclick_operator(padded, eta);
  const Eigen::MatrixXd full = disp.transpose() * k.asDiagonal() * disp;
  return full.topLeftCorner(n_max + 1, n_max + 1);
}

namespace {

int effective_two_mode_levels(double g, const OracleConfig& config) {
  if (!config.auto_raise) return config.n_max;
  const int needed = required_n_max(g, config.tail_tol);
  if (needed > kMaxAutoTwoMode) {
    raise(ErrorKind::kTruncationInsufficient,
          "gain " + format_g17(g) + " needs n_max=" + std::to_string(needed) +
              ", above the automatic two-mode ceiling " + std::to_string(kMaxAutoTwoMode));
  }
  return std::max(config.n_max, needed);
}

struct HeraldedPipeline {
  TruncatedState heralded;    // conditioned on herald click
  TruncatedState unheralded;  // conditioned on herald silence
  double p_click = 0.0;
};

HeraldedPipeline run_herald(const SourceParams& src, const OracleConfig& config) {
  src.validate();
  OracleConfig eff = config;
  eff.n_max = effective_two_mode_levels(src.g, config);
  eff.auto_raise = false;
  const TruncatedState source = tmsv_state(src.g, eff);
  HeraldedPipeline out;
  auto [heralded, p_click] = herald_condition(source, src.eta_h);
  out.heralded = std::move(heralded);
  out.p_click = p_click;

  // Complement condition, needed when false heralds contribute.
  const int d = source.levels();
  Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) {
        acc += source.rho(i * d + k, j * d + k) * std::pow(1.0 - src.eta_h, k);
      }
      reduced(i, j) = acc;
    }
  }
  out.unheralded.n_max = source.n_max;
  out.unheralded.mode_count = 1;
  const double p_silent = reduced.trace();
  out.unheralded.rho = reduced / p_silent;
  return out;
}

}  // namespace

JointProbabilities oracle_joint_probabilities(const SourceParams& src, double alpha,
                                              double beta, double t, double eta,
                                              const OracleConfig& config) {
  check_measurement_args(alpha, beta, t, eta);
  config.validate();
  const HeraldedPipeline pipe = run_herald(src, config);
  const PipelineOps ops =
      build_pipeline_ops(alpha, beta, t, eta, pipe.heralded.n_max);

  auto table_for = [&](const TruncatedState& rho) {
    return table_from_noclick(expectation(rho.rho, ops.joint),
                              expectation(rho.rho, ops.alice_only),
                              expectation(rho.rho, ops.bob_only));
  };

  JointProbabilities p = table_for(pipe.heralded);
  if (src.p_dc > 0.0) {
    const JointProbabilities q = table_for(pipe.unheralded);
    const double p_false = (1.0 - pipe.p_click) * src.p_dc;
    const double total = pipe.p_click + p_false;
    auto mix = [&](double a, double b) { return (pipe.p_click * a + p_false * b) / total; };
    p = {mix(p.p_nc_nc, q.p_nc_nc), mix(p.p_nc_c, q.p_nc_c), mix(p.p_c_nc, q.p_c_nc),
         mix(p.p_c_c, q.p_c_c)};
  }
  return p;
}

double oracle_correlator(const SourceParams& src, double alpha, double beta,
                         double t, double eta, const OracleConfig& config) {
  const JointProbabilities p =
      oracle_joint_probabilities(src, alpha, beta, t, eta, config);
  return p.p_nc_nc - p.p_nc_c - p.p_c_nc + p.p_c_c;
}

JointProbabilities oracle_thermal_joint_probabilities(double n_bar, double alpha,
                                                      double beta, double t,
                                                      double eta,
                                                      const OracleConfig& config) {
  check_measurement_args(alpha, beta, t, eta);
  config.validate();
  if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) {
    raise(ErrorKind::kInvalidParameter,
          "thermal mean photon number must be finite and >= 0, got " + format_g17(n_bar));
  }

  int n_eff = config.n_max;
  const double q = n_bar / (1.0 + n_bar);
  if (config.auto_raise) {
    const int needed = geometric_tail_levels(q, config.tail_tol);
    if (needed > kMaxAutoSingleMode) {
      raise(ErrorKind::kTruncationInsufficient,
            "thermal occupation " + format_g17(n_bar) + " needs n_max=" +
                std::to_string(needed) + ", above the automatic ceiling " +
                std::to_string(kMaxAutoSingleMode));
    }
    n_eff = std::max(n_eff, needed);
  }
  const double tail = std::pow(q, n_eff + 1);
  if (tail > config.tail_tol) {
    raise(ErrorKind::kTruncationInsufficient,
          "thermal tail " + format_g17(tail) + " at n_max=" + std::to_string(n_eff) +
              " exceeds " + format_g17(config.tail_tol));
  }

  const TruncatedState rho = thermal_state(n_bar, n_eff);
  const PipelineOps ops = build_pipeline_ops(alpha, beta, t, eta, n_eff);
  return table_from_noclick(expectation(rho.rho, ops.joint),
                            expectation(rho.rho, ops.alice_only),
                            expectation(rho.rho, ops.bob_only));
}

double oracle_thermal_correlator(double n_bar, double alpha, double beta, double t,
                                 double eta, const OracleConfig& config) {
  const JointProbabilities p =
      oracle_thermal_joint_probabilities(n_bar, alpha, beta, t, eta, config);
  return p.p_nc_nc - p.p_nc_c - p.p_c_nc + p.p_c_c;
}

double oracle_heralding_probability(const SourceParams& src,
                                    const OracleConfig& config) {
  config.validate();
  src.validate();
  OracleConfig eff = config;
  eff.n_max = effective_two_mode_levels(src.g, config);
  eff.auto_raise = false;
  const TruncatedState source = tmsv_state(src.g, eff);
  return herald_condition(source, src.eta_h).second;
}

}  // namespace belldice
