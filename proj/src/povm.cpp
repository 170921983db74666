#include "belldice/povm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "belldice/error.hpp"
#include "belldice/format.hpp"

namespace belldice {

void DisplacedClickDetector::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    raise(ErrorKind::kInvalidEfficiency,
          "detector efficiency must lie in [0, 1], got " + format_g17(eta));
  }
  if (!(alpha_abs >= 0.0) || !std::isfinite(alpha_abs) || !std::isfinite(delta)) {
    raise(ErrorKind::kInvalidAmplitude,
          "displacement must be finite with |alpha| >= 0");
  }
}

QubitPovmPair povm_qubit_matrix(const DisplacedClickDetector& detector) {
  detector.validate();
  const double eta = detector.eta;
  const double x = detector.alpha_abs * detector.alpha_abs;
  const double w = std::exp(-eta * x);
  const std::complex<double> alpha = detector.amplitude();

  QubitPovmPair pair;
  pair.no_click(0, 0) = w;
  pair.no_click(0, 1) = -eta * std::conj(alpha) * w;
  pair.no_click(1, 0) = -eta * alpha * w;
  pair.no_click(1, 1) = (1.0 - eta + eta * eta * x) * w;
  pair.click = Eigen::Matrix2cd::Identity() - pair.no_click;
  return pair;
}

ExtremalDecomposition extremal_decomposition(const DisplacedClickDetector& detector) {
  detector.validate();
  if (detector.eta == 0.0) {
    raise(ErrorKind::kDegenerateMeasurement,
          "eta = 0 leaves {1, 0}, which has no projective direction");
  }

  ExtremalDecomposition out;
  if (detector.alpha_abs == 0.0) {
    // Bare detector: project onto |0> with weight eta, otherwise report
    // no-click unconditionally. Exact, so mu(eta, 0) = eta to the last bit.
    out.mu = detector.eta;
    out.n_vec = Eigen::Vector3d::UnitZ();
    out.r0 = 1.0;
    out.rc = 0.0;
    return out;
  }

  const double eta = detector.eta;
  const double a = detector.alpha_abs;
  const double x = a * a;
  const double w = std::exp(-eta * x);

  // no_click = c0 * 1 + c . sigma in the standard Pauli basis.
  const Eigen::Vector3d c(-eta * a * std::cos(detector.delta) * w,
                          -eta * a * std::sin(detector.delta) * w,
                          0.5 * eta * (1.0 - eta * x) * w);
  const double c0 = 0.5 * (2.0 - eta + eta * eta * x) * w;

  const double norm = c.norm();
  out.mu = 2.0 * norm;
  out.n_vec = c / norm;

  if (1.0 - out.mu < 1e-14) {
    // Sharp limit: the coin carries no weight, its bias is conventional.
    out.mu = std::min(out.mu, 1.0);
    out.r0 = 1.0;
  } else {
    // Exact in reals; clamp only the last-bit rounding spill.
    out.r0 = std::clamp((c0 - 0.5 * out.mu) / (1.0 - out.mu), 0.0, 1.0);
  }
  out.rc = 1.0 - out.r0;
  return out;
}

std::vector<Eigen::Vector3d> bloch_trajectory(double eta,
                                              const std::vector<double>& alpha_grid) {
  std::vector<Eigen::Vector3d> points;
  points.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    const ExtremalDecomposition d = extremal_decomposition({a, 0.0, eta});
    points.push_back(d.mu * d.n_vec);
  }
  return points;
}

std::string trajectory_csv(double eta, const std::vector<double>& alpha_grid) {
  std::ostringstream os;
  os << "alpha,mu,nx,ny,nz,mu_nx,mu_ny,mu_nz\n";
  for (double a : alpha_grid) {
    const ExtremalDecomposition d = extremal_decomposition({a, 0.0, eta});
    const Eigen::Vector3d m = d.mu * d.n_vec;
    os << format_g17(a) << ',' << format_g17(d.mu) << ',' << format_g17(d.n_vec.x())
       << ',' << format_g17(d.n_vec.y()) << ',' << format_g17(d.n_vec.z()) << ','
       << format_g17(m.x()) << ',' << format_g17(m.y()) << ',' << format_g17(m.z())
       << '\n';
  }
  return os.str();
}

}  // namespace belldice
