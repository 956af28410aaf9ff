#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fundlim {

/// SISO discrete-time plant  x_{k+1} = A x_k + B e_k,  y_k = C x_k.
class StateSpaceModel {
 public:
  /// Throws InvalidModel on inconsistent dimensions, an empty state, or
  /// non-finite entries.
  StateSpaceModel(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c);

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::RowVectorXd& c() const { return c_; }
  Eigen::Index order() const { return a_.rows(); }

  /// Realization (T A T^-1, T B, C T^-1) of the same transfer function.
  StateSpaceModel similarity_transform(const Eigen::MatrixXd& t) const;

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::RowVectorXd c_;
};

/// Numerical thresholds used by the analysis routines.
struct AnalysisTolerances {
  /// Markov parameter C A^i B counts as zero below tol_markov * |C| |A|^i |B|.
  double markov = 1e-9;
  /// Pencil eigenvalue (alpha, beta) is infinite when |beta| < tol_inf * |alpha|.
  double infinite = 1e-8;
  /// Pole and zero closer than this (relative) are reported as a cancellation.
  double cancellation = 1e-6;
};

struct PoleAnalysis {
  std::vector<std::complex<double>> poles;
  double unstable_pole_product = 1.0;
};

struct RelativeDegree {
  int nu = 0;
  double rho = 0.0;
};

struct PlantCharacteristics {
  std::vector<std::complex<double>> poles;
  double unstable_pole_product = 1.0;
  std::vector<std::complex<double>> finite_zeros;
  double nmp_zero_product = 1.0;
  int relative_degree = 0;
  double markov_gain = 0.0;
  std::vector<std::string> warnings;
};

/// Eigenvalues of A and the product of max{1, |lambda_i|} over all of them.
PoleAnalysis analyze_poles(const StateSpaceModel& model);

/// Smallest i with C A^i B nonzero (relative test) and the value C A^i B.
/// Throws ZeroTransferFunction when no such i <= n exists.
RelativeDegree relative_degree_and_gain(const StateSpaceModel& model,
                                        const AnalysisTolerances& tol = {});

/// Finite generalized eigenvalues of the Rosenbrock pencil
/// ([A B; C 0], diag(I, 0)), i.e. the invariant zeros of the plant.
/// Throws DegenerateRealization when the pencil is singular.
std::vector<std::complex<double>> compute_finite_zeros(const StateSpaceModel& model,
                                                       const AnalysisTolerances& tol = {});

/// Product of max{1, |z|}; 1 for an empty list.
double nmp_zero_product(const std::vector<std::complex<double>>& zeros);

/// Runs every analysis above and collects warnings (nu = 0, pole/zero
/// near-cancellation).
PlantCharacteristics analyze_plant(const StateSpaceModel& model,
                                   const AnalysisTolerances& tol = {});

}  // namespace fundlim
