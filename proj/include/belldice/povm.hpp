#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace belldice {

// One measurement setting: displace the mode by alpha = |alpha| e^{i delta},
// then watch a non-photon-number-resolving detector of efficiency eta.
// Outcome "no click" is +1, "click" is -1.
struct DisplacedClickDetector {
  double alpha_abs = 0.0;
  double delta = 0.0;
  double eta = 1.0;

  std::complex<double> amplitude() const { return std::polar(alpha_abs, delta); }
  void validate() const;
};

// Both POVM elements restricted to the {|0>, |1>} subspace.
struct QubitPovmPair {
  Eigen::Matrix2cd no_click;
  Eigen::Matrix2cd click;
};

// Convex split of the no-click element into a sharp part and a coin:
//   no_click = mu * (1 + n_vec . sigma)/2 + (1 - mu) * r0 * 1.
// mu is the largest projective weight compatible with the pair; r0 (rc) is
// the probability that the unsharp remainder reports no-click (click).
struct ExtremalDecomposition {
  double mu = 0.0;
  Eigen::Vector3d n_vec = Eigen::Vector3d::UnitZ();
  double r0 = 1.0;
  double rc = 0.0;
};

QubitPovmPair povm_qubit_matrix(const DisplacedClickDetector& detector);

ExtremalDecomposition extremal_decomposition(const DisplacedClickDetector& detector);

// mu * n_vec along an |alpha| grid at delta = 0. The path leaves the Bloch
// sphere's z axis and sweeps through the x-z plane as |alpha| grows.
std::vector<Eigen::Vector3d> bloch_trajectory(double eta,
                                              const std::vector<double>& alpha_grid);

// CSV table of the trajectory: alpha,mu,nx,ny,nz,mu_nx,mu_ny,mu_nz.
std::string trajectory_csv(double eta, const std::vector<double>& alpha_grid);

}  // namespace belldice
