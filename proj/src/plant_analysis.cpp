#include "fundlim/plant_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fundlim/errors.hpp"

namespace fundlim {

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  const Eigen::Index n = a_.rows();
  if (n < 1) throw InvalidModel("A must have at least one row");
  if (a_.cols() != n) {
    std::ostringstream os;
    os << "A must be square, got " << a_.rows() << "x" << a_.cols();
    throw InvalidModel(os.str());
  }
  if (b_.size() != n) {
    throw InvalidModel("B must have " + std::to_string(n) + " entries, got " +
                       std::to_string(b_.size()));
  }
  if (c_.size() != n) {
    throw InvalidModel("C must have " + std::to_string(n) + " entries, got " +
                       std::to_string(c_.size()));
  }
  if (!a_.allFinite()) throw InvalidModel("A has non-finite entries");
  if (!b_.allFinite()) throw InvalidModel("B has non-finite entries");
  if (!c_.allFinite()) throw InvalidModel("C has non-finite entries");
}

StateSpaceModel StateSpaceModel::similarity_transform(const Eigen::MatrixXd& t) const {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(t);
  const Eigen::MatrixXd t_inv = lu.inverse();
  return StateSpaceModel(t * a_ * t_inv, t * b_, c_ * t_inv);
}

PoleAnalysis analyze_poles(const StateSpaceModel& model) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(model.a(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw InvalidModel("eigenvalue computation for A did not converge");
  }
  PoleAnalysis out;
  const auto& ev = solver.eigenvalues();
  out.poles.assign(ev.data(), ev.data() + ev.size());
  for (const auto& lambda : out.poles) {
    out.unstable_pole_product *= std::max(1.0, std::abs(lambda));
  }
  return out;
}

RelativeDegree relative_degree_and_gain(const StateSpaceModel& model,
                                        const AnalysisTolerances& tol) {
  const double norm_a = spectral_norm(model.a());
  const double norm_b = model.b().norm();
  const double norm_c = model.c().norm();
  const Eigen::Index n = model.order();

  // Cayley-Hamilton: if C A^i B vanishes for i <= n it vanishes for all i.
  Eigen::VectorXd ai_b = model.b();
  double norm_a_pow = 1.0;
  for (Eigen::Index i = 0; i <= n; ++i) {
    const double markov = model.c().dot(ai_b);
    const double scale = norm_c * norm_a_pow * norm_b;
    if (std::abs(markov) > tol.markov * scale) {
      return {static_cast<int>(i), markov};
    }
    ai_b = model.a() * ai_b;
    norm_a_pow *= norm_a;
  }
  throw ZeroTransferFunction("C A^i B vanishes for every i <= n; the transfer function is zero");
}

std::vector<std::complex<double>> compute_finite_zeros(const StateSpaceModel& model,
                                                       const AnalysisTolerances& tol) {
  const Eigen::Index n = model.order();

  // A SISO plant with leading Markov parameter at index nu has exactly
  // n - nu - 1 finite invariant zeros; a vanishing transfer function makes
  // the pencil singular.
  RelativeDegree rd;
  try {
    rd = relative_degree_and_gain(model, tol);
  } catch (const ZeroTransferFunction&) {
    throw DegenerateRealization("Rosenbrock pencil is singular (zero transfer function)");
  }
  const Eigen::Index expected = n - rd.nu - 1;

  Eigen::MatrixXd pencil = Eigen::MatrixXd::Zero(n + 1, n + 1);
  pencil.topLeftCorner(n, n) = model.a();
  pencil.topRightCorner(n, 1) = model.b();
  pencil.bottomLeftCorner(1, n) = model.c();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n + 1, n + 1);
  mass.topLeftCorner(n, n).setIdentity();

  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> solver(pencil, mass, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw DegenerateRealization("QZ iteration on the Rosenbrock pencil did not converge");
  }

  const double scale = std::max(spectral_norm(pencil), 1.0);
  const double eps = std::numeric_limits<double>::epsilon();
  struct Candidate {
    std::complex<double> alpha;
    double beta;
    double finiteness;  // |beta| / |alpha|
  };
  std::vector<Candidate> candidates;
  for (Eigen::Index i = 0; i < n + 1; ++i) {
    const std::complex<double> alpha = solver.alphas()(i);
    const double beta = solver.betas()(i);
    if (std::abs(alpha) <= 100 * eps * scale && std::abs(beta) <= 100 * eps) {
      throw DegenerateRealization("Rosenbrock pencil has a 0/0 eigenvalue");
    }
    const double finiteness =
        std::abs(alpha) == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(beta) / std::abs(alpha);
    candidates.push_back({alpha, beta, finiteness});
  }

  // Infinite eigenvalues sitting in a Jordan chain of length ν + 2 are only
  // resolved to about eps^(1/(ν+2)), which can pass the tol_inf test; the
  // structural count decides which candidates are finite.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& l, const Candidate& r) { return l.finiteness > r.finiteness; });
  std::vector<std::complex<double>> zeros;
  for (Eigen::Index i = 0; i < expected; ++i) {
    const auto& c = candidates[static_cast<std::size_t>(i)];
    if (c.finiteness < tol.infinite) {
      throw DegenerateRealization("expected " + std::to_string(expected) +
                                  " finite zeros but the pencil resolved fewer");
    }
    zeros.push_back(c.alpha / c.beta);
  }

  // Real zeros come back with round-off imaginary parts; conjugate pairs stay paired.
  for (auto& z : zeros) {
    if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z))) z = {z.real(), 0.0};
  }
  std::sort(zeros.begin(), zeros.end(), [](const auto& l, const auto& r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  });
  return zeros;
}

double nmp_zero_product(const std::vector<std::complex<double>>& zeros) {
  return std::accumulate(zeros.begin(), zeros.end(), 1.0, [](double acc, const std::complex<double>& z) {
    return acc * std::max(1.0, std::abs(z));
  });
}

PlantCharacteristics analyze_plant(const StateSpaceModel& model, const AnalysisTolerances& tol) {
  PlantCharacteristics out;
  auto poles = analyze_poles(model);
  out.poles = std::move(poles.poles);
  out.unstable_pole_product = poles.unstable_pole_product;

  const auto rd = relative_degree_and_gain(model, tol);
  out.relative_degree = rd.nu;
  out.markov_gain = rd.rho;
  out.finite_zeros = compute_finite_zeros(model, tol);
  out.nmp_zero_product = nmp_zero_product(out.finite_zeros);

  if (rd.nu == 0) {
    out.warnings.push_back("relative degree nu = 0 (C B != 0); the output bound assumes nu > 0");
  }
  for (const auto& z : out.finite_zeros) {
    for (const auto& p : out.poles) {
      if (std::abs(z - p) <= tol.cancellation * std::max(1.0, std::abs(p))) {
        std::ostringstream os;
        os << "pole/zero near-cancellation at " << p.real() << (p.imag() < 0 ? "-" : "+")
           << std::abs(p.imag()) << "i";
        out.warnings.push_back(os.str());
      }
    }
  }
  return out;
}

}  // namespace fundlim
