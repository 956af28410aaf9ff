#include "fundlim/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fundlim/errors.hpp"
#include "fundlim/format.hpp"

namespace fundlim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double gaussian_entropy_bits(double variance) { return 0.5 * std::log2(2.0 * kPi * kE * variance); }

// Companion matrix of the AR recursion acting on (d_{k-1}, ..., d_{k-m}).
Eigen::MatrixXd ar_companion(const std::vector<double>& coeffs) {
  const auto m = static_cast<Eigen::Index>(coeffs.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) f(0, j) = coeffs[static_cast<std::size_t>(j)];
  if (m > 1) f.bottomLeftCorner(m - 1, m - 1).setIdentity();
  return f;
}

double ar_stationary_variance(const GaussAR& ar) {
  if (ar.coeffs.empty()) return ar.innovation_sigma * ar.innovation_sigma;
  const Eigen::MatrixXd f = ar_companion(ar.coeffs);
  const Eigen::Index m = f.rows();
  // vec(P) = (I - F (x) F)^-1 vec(Q),  Q = sigma_w^2 e1 e1^T
  Eigen::MatrixXd kron(m * m, m * m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) kron.block(i * m, j * m, m, m) = f(i, j) * f;
  Eigen::VectorXd q = Eigen::VectorXd::Zero(m * m);
  q(0) = ar.innovation_sigma * ar.innovation_sigma;
  const Eigen::VectorXd p =
      (Eigen::MatrixXd::Identity(m * m, m * m) - kron).partialPivLu().solve(q);
  return p(0);
}

double gengauss_variance(const IIDGeneralizedGaussian& g) {
  // scale alpha = p^{1/p} mu;  E x^2 = alpha^2 Gamma(3/p) / Gamma(1/p)
  const double p = g.shape;
  const double log_alpha = std::log(p) / p + std::log(g.lp_norm);
  return std::exp(2.0 * log_alpha + std::lgamma(3.0 / p) - std::lgamma(1.0 / p));
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw InvalidModel(std::string(what) + " must be finite and > 0");
  }
}

}  // namespace

DisturbanceModel::DisturbanceModel(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const IIDGaussian& g) { require_positive(g.sigma, "sigma"); },
                 [](const IIDUniform& u) { require_positive(u.half_width, "half_width"); },
                 [](const IIDGeneralizedGaussian& g) {
                   if (!std::isfinite(g.shape) || g.shape < 1.0) {
                     throw InvalidModel("generalized Gaussian shape p must satisfy 1 <= p < inf");
                   }
                   require_positive(g.lp_norm, "mu");
                 },
                 [](const GaussAR& ar) {
                   require_positive(ar.innovation_sigma, "innovation sigma");
                   for (double c : ar.coeffs) {
                     if (!std::isfinite(c)) throw InvalidModel("AR coefficients must be finite");
                   }
                   if (ar.coeffs.empty()) return;
                   Eigen::EigenSolver<Eigen::MatrixXd> es(ar_companion(ar.coeffs), false);
                   for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
                     if (std::abs(es.eigenvalues()(i)) >= 1.0) {
                       throw InvalidModel("AR polynomial has a root on or outside the unit circle");
                     }
                   }
                 },
             },
             v_);
}

bool DisturbanceModel::is_gaussian() const {
  return std::visit(overloaded{
                        [](const IIDGaussian&) { return true; },
                        [](const IIDUniform&) { return false; },
                        [](const IIDGeneralizedGaussian& g) { return g.shape == 2.0; },
                        [](const GaussAR&) { return true; },
                    },
                    v_);
}

std::string DisturbanceModel::type_name() const {
  return std::visit(overloaded{
                        [](const IIDGaussian&) { return std::string("iid_gaussian"); },
                        [](const IIDUniform&) { return std::string("iid_uniform"); },
                        [](const IIDGeneralizedGaussian&) { return std::string("iid_gengauss"); },
                        [](const GaussAR&) { return std::string("gauss_ar"); },
                    },
                    v_);
}

double DisturbanceModel::variance() const {
  return std::visit(overloaded{
                        [](const IIDGaussian& g) { return g.sigma * g.sigma; },
                        [](const IIDUniform& u) { return u.half_width * u.half_width / 3.0; },
                        [](const IIDGeneralizedGaussian& g) { return gengauss_variance(g); },
                        [](const GaussAR& ar) { return ar_stationary_variance(ar); },
                    },
                    v_);
}

DisturbanceModel DisturbanceModel::scaled(double s) const {
  require_positive(s, "scale factor");
  return DisturbanceModel(std::visit(
      overloaded{
          [s](const IIDGaussian& g) -> Variant { return IIDGaussian{g.sigma * s}; },
          [s](const IIDUniform& u) -> Variant { return IIDUniform{u.half_width * s}; },
          [s](const IIDGeneralizedGaussian& g) -> Variant {
            return IIDGeneralizedGaussian{g.shape, g.lp_norm * s};
          },
          [s](const GaussAR& ar) -> Variant { return GaussAR{ar.coeffs, ar.innovation_sigma * s}; },
      },
      v_));
}

// ---------------------------------------------------------------------------

double max_entropy_pdf(NormOrder p, double mu, double x) {
  if (!(mu > 0.0)) throw InvalidModel("mu must be > 0");
  if (p.is_infinite()) return std::abs(x) <= mu ? 1.0 / (2.0 * mu) : 0.0;
  const double q = p.value();
  const double log_norm = std::log(2.0) + std::lgamma(1.0 + 1.0 / q) + std::log(q) / q + std::log(mu);
  return std::exp(-std::pow(std::abs(x) / mu, q) / q - log_norm);
}

double max_entropy_value(NormOrder p, double mu) {
  if (!(mu > 0.0)) throw InvalidModel("mu must be > 0");
  if (p.is_infinite()) return std::log2(2.0 * mu);
  const double q = p.value();
  const double nats = std::log(2.0) + std::lgamma(1.0 + 1.0 / q) + (std::log(q) + 1.0) / q + std::log(mu);
  return nats / std::numbers::ln2;
}

// ---------------------------------------------------------------------------

std::uint64_t mix_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DisturbanceSampler::DisturbanceSampler(const DisturbanceModel& model, std::uint64_t seed)
    : model_(model), engine_(mix_seed(seed)) {
  if (const auto* g = std::get_if<IIDGeneralizedGaussian>(&model_.variant())) {
    gamma_ = std::gamma_distribution<double>(1.0 / g->shape, 1.0);
  }
  if (const auto* ar = std::get_if<GaussAR>(&model_.variant())) {
    history_.assign(ar->coeffs.size(), 0.0);
  }
}

double DisturbanceSampler::next() {
  return std::visit(
      overloaded{
          [this](const IIDGaussian& g) { return g.sigma * normal_(engine_); },
          [this](const IIDUniform& u) { return u.half_width * uniform_(engine_); },
          [this](const IIDGeneralizedGaussian& g) {
            // |x|^p / (p mu^p) ~ Gamma(1/p, 1), symmetric sign.
            const double p = g.shape;
            const double magnitude = std::pow(p, 1.0 / p) * g.lp_norm * std::pow(gamma_(engine_), 1.0 / p);
            return sign_(engine_) ? magnitude : -magnitude;
          },
          [this](const GaussAR& ar) {
            double d = ar.innovation_sigma * normal_(engine_);
            for (std::size_t i = 0; i < ar.coeffs.size(); ++i) d += ar.coeffs[i] * history_[i];
            if (!history_.empty()) {
              std::rotate(history_.rbegin(), history_.rbegin() + 1, history_.rend());
              history_[0] = d;
            }
            return d;
          },
      },
      model_.variant());
}

std::vector<double> sample(const DisturbanceModel& model, std::uint64_t seed, std::size_t length) {
  DisturbanceSampler sampler(model, seed);
  std::vector<double> out(length);
  for (auto& v : out) v = sampler.next();
  return out;
}

// ---------------------------------------------------------------------------

double conditional_entropy_rate(const DisturbanceModel& model) {
  return std::visit(overloaded{
                        [](const IIDGaussian& g) { return gaussian_entropy_bits(g.sigma * g.sigma); },
                        [](const IIDUniform& u) { return std::log2(2.0 * u.half_width); },
                        [](const IIDGeneralizedGaussian& g) {
                          return max_entropy_value(NormOrder(g.shape), g.lp_norm);
                        },
                        [](const GaussAR& ar) {
                          return gaussian_entropy_bits(ar.innovation_sigma * ar.innovation_sigma);
                        },
                    },
                    model.variant());
}

double negentropy_rate(const DisturbanceModel& model) {
  if (model.is_gaussian()) return 0.0;
  // Non-Gaussian families here are all i.i.d.
  const double gap = gaussian_entropy_bits(model.variance()) - conditional_entropy_rate(model);
  return std::max(0.0, gap);
}

EntropySummary entropy_summary(const DisturbanceModel& model) {
  const double rate = conditional_entropy_rate(model);
  return {rate, rate, negentropy_rate(model), model.is_stationary()};
}

// ---------------------------------------------------------------------------

SpectralDensity::SpectralDensity(Evaluator evaluator, std::size_t grid_size)
    : evaluator_(std::move(evaluator)) {
  if (grid_size < 16 || grid_size % 2 != 0) {
    throw InvalidModel("spectrum grid size must be even and >= 16");
  }
  values_.resize(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) values_[i] = evaluator_(grid_point(i));
}

SpectralDensity SpectralDensity::from_samples(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n < 16 || n % 2 != 0) {
    throw InvalidModel("spectrum grid size must be even and >= 16");
  }
  SpectralDensity out;
  out.values_ = std::move(values);
  out.evaluator_ = [tab = out.values_](double omega) {
    const double n_d = static_cast<double>(tab.size());
    double pos = (omega + kPi) / (2.0 * kPi) * n_d;
    pos = std::fmod(pos, n_d);
    if (pos < 0) pos += n_d;
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return (1.0 - frac) * tab[i % tab.size()] + frac * tab[(i + 1) % tab.size()];
  };
  return out;
}

double SpectralDensity::grid_point(std::size_t i) const {
  return -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(values_.size());
}

SpectralDensity power_spectrum(const DisturbanceModel& model, std::size_t grid_size) {
  if (const auto* ar = std::get_if<GaussAR>(&model.variant())) {
    return SpectralDensity(
        [coeffs = ar->coeffs, s2 = ar->innovation_sigma * ar->innovation_sigma](double omega) {
          std::complex<double> denom = 1.0;
          for (std::size_t i = 0; i < coeffs.size(); ++i) {
            denom -= coeffs[i] * std::polar(1.0, -omega * static_cast<double>(i + 1));
          }
          return s2 / std::norm(denom);
        },
        grid_size);
  }
  return SpectralDensity([v = model.variance()](double) { return v; }, grid_size);
}

double szego_log_integral(const SpectralDensity& spectrum) {
  // Periodic trapezoid: (1/2pi) * (2pi/N) * sum = mean over the grid.
  double sum = 0.0;
  for (std::size_t i = 0; i < spectrum.values().size(); ++i) {
    const double s = spectrum.values()[i];
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw SpectrumNotLogIntegrable("spectrum value " + format_double(s) + " at grid point " +
                                     std::to_string(i) + " is not positive and finite");
    }
    sum += std::log2(s);
  }
  return sum / static_cast<double>(spectrum.values().size());
}

double szego_entropy_rate(const SpectralDensity& spectrum, double negentropy) {
  return 0.5 * (std::log2(2.0 * kPi * kE) + szego_log_integral(spectrum)) - negentropy;
}

}  // namespace fundlim
