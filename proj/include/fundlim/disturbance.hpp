#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "fundlim/norm_order.hpp"

namespace fundlim {

// ---------------------------------------------------------------------------
// Disturbance families. Every process is zero-mean. Entropies are in bits.
// ---------------------------------------------------------------------------

struct IIDGaussian {
  double sigma;
};

/// i.i.d. uniform on [-a, a].
struct IIDUniform {
  double half_width;
};

/// i.i.d. maximum-entropy density for a fixed L_p norm mu,
/// f(x) proportional to exp(-|x|^p / (p mu^p)).
struct IIDGeneralizedGaussian {
  double shape;
  double lp_norm;
};

/// d_k = sum_i coeffs[i] d_{k-1-i} + w_k with Gaussian innovations w_k.
struct GaussAR {
  std::vector<double> coeffs;
  double innovation_sigma;
};

class DisturbanceModel {
 public:
  using Variant = std::variant<IIDGaussian, IIDUniform, IIDGeneralizedGaussian, GaussAR>;

  /// Throws InvalidModel on non-positive scales, shape < 1, or an AR
  /// polynomial with a root on or outside the unit circle.
  explicit DisturbanceModel(Variant v);

  const Variant& variant() const { return v_; }
  bool is_gaussian() const;
  /// True for every supported family (all are stationary or, for GaussAR
  /// started from rest, asymptotically stationary).
  bool is_stationary() const { return true; }
  /// Short tag matching the JSON "type" field.
  std::string type_name() const;

  /// Marginal variance of the stationary process.
  double variance() const;

  /// Same family with every sample multiplied by s > 0.
  DisturbanceModel scaled(double s) const;

 private:
  Variant v_;
};

struct EntropySummary {
  double conditional_entropy_rate;
  double entropy_rate;
  double negentropy_rate;
  bool stationary;
};

/// Power spectrum S(w) tabulated on the uniform periodic grid
/// w_i = -pi + 2 pi i / N, i = 0..N-1.
class SpectralDensity {
 public:
  using Evaluator = std::function<double(double)>;

  /// Tabulates `evaluator` on N points (N >= 16, even).
  SpectralDensity(Evaluator evaluator, std::size_t grid_size);

  /// Tabulated values on the grid above; evaluation between grid points is
  /// linear (periodic).
  static SpectralDensity from_samples(std::vector<double> values);

  double operator()(double omega) const { return evaluator_(omega); }
  std::size_t grid_size() const { return values_.size(); }
  double grid_point(std::size_t i) const;
  const std::vector<double>& values() const { return values_; }

 private:
  SpectralDensity() = default;
  Evaluator evaluator_;
  std::vector<double> values_;
};

inline constexpr std::size_t kDefaultSpectrumGrid = 4096;

/// Lemma density e^{-|x|^p/(p mu^p)} / (2 Gamma((p+1)/p) p^{1/p} mu); for
/// p = inf the uniform density on [-mu, mu]. Throws UnsupportedShape for p < 1.
double max_entropy_pdf(NormOrder p, double mu, double x);

/// log2[2 Gamma((p+1)/p) (p e)^{1/p} mu]; log2(2 mu) for p = inf.
double max_entropy_value(NormOrder p, double mu);

/// Deterministic stream of disturbance samples for one trajectory.
class DisturbanceSampler {
 public:
  DisturbanceSampler(const DisturbanceModel& model, std::uint64_t seed);
  double next();

 private:
  DisturbanceModel model_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
  std::gamma_distribution<double> gamma_{1.0, 1.0};
  std::bernoulli_distribution sign_{0.5};
  std::vector<double> history_;  // most recent first (GaussAR)
};

/// Mixes a user seed into a well-spread engine seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed);

std::vector<double> sample(const DisturbanceModel& model, std::uint64_t seed, std::size_t length);

double conditional_entropy_rate(const DisturbanceModel& model);
double negentropy_rate(const DisturbanceModel& model);
EntropySummary entropy_summary(const DisturbanceModel& model);

SpectralDensity power_spectrum(const DisturbanceModel& model,
                               std::size_t grid_size = kDefaultSpectrumGrid);

/// (1/2 pi) * integral over [-pi, pi] of log2 S(w) dw, periodic trapezoid.
/// Throws SpectrumNotLogIntegrable when any grid value is <= 0.
double szego_log_integral(const SpectralDensity& spectrum);

/// h_inf(d) = (1/2 pi) int log2 sqrt(2 pi e S(w)) dw - J_inf(d).
double szego_entropy_rate(const SpectralDensity& spectrum, double negentropy);

}  // namespace fundlim
