#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fundlim/bounds.hpp"
#include "fundlim/errors.hpp"

using namespace fundlim;
using doctest::Approx;

namespace {

PlantCharacteristics stable_plant() {
  PlantCharacteristics c;
  c.poles = {{0.5, 0.0}};
  c.markov_gain = 1.0;
  return c;
}

PlantCharacteristics scalar_plant(double a) {
  PlantCharacteristics c;
  c.poles = {{a, 0.0}};
  c.unstable_pole_product = std::max(1.0, std::abs(a));
  c.markov_gain = 1.0;
  return c;
}

EntropySummary gaussian(double sigma) { return entropy_summary(DisturbanceModel(IIDGaussian{sigma})); }
EntropySummary uniform(double a) { return entropy_summary(DisturbanceModel(IIDUniform{a})); }

DisturbanceModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> scale(0.1, 5.0), shape(1.0, 8.0), root(-0.9, 0.9);
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return DisturbanceModel(IIDGaussian{scale(rng)});
    case 1: return DisturbanceModel(IIDUniform{scale(rng)});
    case 2: return DisturbanceModel(IIDGeneralizedGaussian{shape(rng), scale(rng)});
    default: {
      const double r1 = root(rng), r2 = root(rng);
      return DisturbanceModel(GaussAR{{r1 + r2, -r1 * r2}, scale(rng)});
    }
  }
}

NormOrder random_order(std::mt19937_64& rng) {
  if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) return NormOrder::infinity();
  return NormOrder(std::uniform_real_distribution<double>(1.0, 12.0)(rng));
}

PlantCharacteristics random_plant(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const int n = std::uniform_int_distribution<int>(1, 4)(rng);
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b(n);
  Eigen::RowVectorXd c(n);
  // half the draws are scaled down to be stable
  const double shrink = std::uniform_int_distribution<int>(0, 1)(rng) ? 0.2 : 1.0;
  for (int i = 0; i < n; ++i) {
    b(i) = normal(rng);
    c(i) = normal(rng);
    for (int j = 0; j < n; ++j) a(i, j) = shrink * normal(rng);
  }
  return analyze_plant(StateSpaceModel(a, b, c));
}

}  // namespace

TEST_CASE("cp_constant examples") {
  CHECK(std::abs(cp_constant(NormOrder(2)) - 0.241971) < 1e-6);
  CHECK(cp_constant(NormOrder(2)) == Approx(1.0 / std::sqrt(2 * std::numbers::pi * std::numbers::e)).epsilon(1e-15));
  CHECK(cp_constant(NormOrder::infinity()) == 0.5);
  CHECK(cp_constant(NormOrder(1)) == Approx(1.0 / (2 * std::numbers::e)).epsilon(1e-14));
  CHECK(std::abs(cp_constant(NormOrder(1)) - 0.183940) < 1e-6);
  const double big = cp_constant(NormOrder(1000));
  CHECK(big >= 0.495);
  CHECK(big <= 0.5);
  // the general formula agrees with the p = 2 special case
  CHECK(cp_constant(NormOrder(2.0 + 1e-12)) == Approx(cp_constant(NormOrder(2))).epsilon(1e-10));
  CHECK_THROWS_AS(NormOrder(0.99), InvalidOrder);
}

TEST_CASE("error_bound_lti examples") {
  auto r = error_bound_lti(NormOrder(2), stable_plant(), gaussian(1.0));
  CHECK(r.bound() == Approx(1.0).epsilon(1e-14));
  CHECK(r.kind() == BoundKind::kErrorLti);
  r = error_bound_lti(NormOrder(2), scalar_plant(2.0), gaussian(1.0));
  CHECK(r.bound() == Approx(2.0).epsilon(1e-14));
  CHECK(*r.variance_floor() == Approx(4.0).epsilon(1e-14));
  r = error_bound_lti(NormOrder::infinity(), stable_plant(), uniform(1.0));
  CHECK(r.bound() == 1.0);
  CHECK_FALSE(r.variance_floor().has_value());
}

TEST_CASE("p = 2 and p = inf specializations") {
  const auto v = error_bound_p2(scalar_plant(2.0), gaussian(1.0));
  CHECK(v.kind() == BoundKind::kVariance);
  CHECK(*v.variance_floor() == Approx(4.0).epsilon(1e-14));
  CHECK(error_bound_pinf(stable_plant(), uniform(1.0)).bound() == 1.0);
  CHECK(error_bound_pinf(stable_plant(), uniform(1.0)).kind() == BoundKind::kMaxDeviation);
  CHECK(error_bound_p2(stable_plant(), gaussian(3.0)).bound() == Approx(3.0).epsilon(1e-14));
  CHECK(error_bound_p2(scalar_plant(1.7), gaussian(0.4)).bound() ==
        error_bound_lti(NormOrder(2), scalar_plant(1.7), gaussian(0.4)).bound());
}

TEST_CASE("error_bound_spectral examples") {
  const DisturbanceModel ar(GaussAR{{0.9}, 1.0});
  auto r = error_bound_spectral(NormOrder(2), stable_plant(), power_spectrum(ar, 8192), 0.0);
  CHECK(r.kind() == BoundKind::kKolmogorovSzego);
  CHECK(std::abs(*r.variance_floor() - 1.0) < 1e-3);

  const double sigma = 1.8;
  r = error_bound_spectral(NormOrder(2), stable_plant(), SpectralDensity([&](double) { return sigma * sigma; }, 64), 0.0);
  CHECK(*r.variance_floor() == Approx(sigma * sigma).epsilon(1e-13));

  const DisturbanceModel u(IIDUniform{1.0});
  r = error_bound_spectral(NormOrder(2), stable_plant(), power_spectrum(u), negentropy_rate(u));
  CHECK(r.kind() == BoundKind::kSpectral);
  const double direct = error_bound_lti(NormOrder(2), stable_plant(), entropy_summary(u)).bound();
  CHECK(std::abs(r.bound() / direct - 1.0) < 1e-3);
  // the uniform floor is sqrt(2/(pi e)), below the uniform's own L2 norm 1/sqrt(3)
  CHECK(direct == Approx(std::sqrt(2.0 / (std::numbers::pi * std::numbers::e))).epsilon(1e-13));
  CHECK(direct < 1.0 / std::sqrt(3.0));

  CHECK(error_bound_spectral(NormOrder(2), scalar_plant(2.0), power_spectrum(ar, 256), 0.0).kind() ==
        BoundKind::kSpectral);
}

TEST_CASE("output_bound examples") {
  PlantCharacteristics c;
  c.markov_gain = 1.0;
  c.finite_zeros = {{2.0, 0.0}};
  c.nmp_zero_product = 2.0;
  CHECK(output_bound(NormOrder(2), c, gaussian(1.0)).bound() == Approx(2.0).epsilon(1e-14));

  c.finite_zeros.clear();
  c.nmp_zero_product = 1.0;
  CHECK(output_bound(NormOrder(2), c, gaussian(1.0)).bound() == Approx(1.0).epsilon(1e-14));

  c.markov_gain = -0.5;
  c.finite_zeros = {{-3.0, 0.0}};
  c.nmp_zero_product = 3.0;
  const auto r = output_bound(NormOrder::infinity(), c, uniform(1.0));
  CHECK(r.bound() == Approx(1.5).epsilon(1e-14));
  CHECK(*r.gain() == 0.5);
  CHECK(r.factors().plant_factor == 3.0);
  CHECK(r.kind() == BoundKind::kOutput);

  c.markov_gain = 0.0;
  CHECK_THROWS_AS(output_bound(NormOrder(2), c, gaussian(1.0)), ZeroTransferFunction);
}

TEST_CASE("error_bound_generic examples") {
  CHECK(error_bound_generic(NormOrder(2), gaussian(1.0)).bound() == Approx(1.0).epsilon(1e-14));
  CHECK(error_bound_generic(NormOrder::infinity(), uniform(1.0)).bound() == 1.0);
  CHECK(error_bound_generic(NormOrder(2), gaussian(1.0)).factors().plant_factor == 1.0);
  // per-step form: h(d_k | past) = 3 bits at p = inf gives 2^3 / 2
  CHECK(error_bound_generic_at(NormOrder::infinity(), 3.0).bound() == 4.0);
  CHECK_THROWS_AS(error_bound_generic_at(NormOrder(2), std::numeric_limits<double>::infinity()), InvalidModel);
}

TEST_CASE("theorem tags round-trip") {
  for (auto k : {BoundKind::kErrorLti, BoundKind::kOutput, BoundKind::kErrorGeneric, BoundKind::kVariance,
                 BoundKind::kMaxDeviation, BoundKind::kSpectral, BoundKind::kKolmogorovSzego}) {
    CHECK(bound_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(bound_kind_from_string("T9"), InputError);
}

TEST_CASE("property: LTI bound dominates the generic bound") {
  std::mt19937_64 rng(99);
  int unstable_seen = 0, stable_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto plant = random_plant(rng);
    const auto ent = entropy_summary(random_model(rng));
    const auto p = random_order(rng);
    const double lti = error_bound_lti(p, plant, ent).bound();
    const double generic = error_bound_generic(p, ent).bound();
    CHECK(lti >= generic);
    if (plant.unstable_pole_product == 1.0) {
      CHECK(lti == generic);
      ++stable_seen;
    } else {
      CHECK(lti > generic);
      ++unstable_seen;
    }
  }
  CHECK(stable_seen > 10);
  CHECK(unstable_seen > 10);
}

TEST_CASE("property: scaling the disturbance scales every bound") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> s_pick(0.05, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto plant = random_plant(rng);
    const auto model = random_model(rng);
    const double s = s_pick(rng);
    const auto p = random_order(rng);
    const auto e1 = entropy_summary(model), e2 = entropy_summary(model.scaled(s));
    CHECK(error_bound_lti(p, plant, e2).bound() == Approx(s * error_bound_lti(p, plant, e1).bound()).epsilon(1e-12));
    CHECK(error_bound_generic(p, e2).bound() == Approx(s * error_bound_generic(p, e1).bound()).epsilon(1e-12));
    CHECK(output_bound(p, plant, e2).bound() == Approx(s * output_bound(p, plant, e1).bound()).epsilon(1e-12));
  }
}

TEST_CASE("property: spectral route agrees with the entropy route") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto plant = random_plant(rng);
    const auto model = random_model(rng);
    const auto p = random_order(rng);
    const double spectral =
        error_bound_spectral(p, plant, power_spectrum(model), negentropy_rate(model)).bound();
    const double direct = error_bound_lti(p, plant, entropy_summary(model)).bound();
    CHECK(std::abs(spectral / direct - 1.0) < 1e-3);
  }
}

TEST_CASE("property: stored factors reproduce the bound bit for bit") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto plant = random_plant(rng);
    const auto model = random_model(rng);
    const auto ent = entropy_summary(model);
    const auto p = random_order(rng);
    for (const auto& r : {error_bound_lti(p, plant, ent), output_bound(p, plant, ent), error_bound_generic(p, ent),
                          error_bound_spectral(p, plant, power_spectrum(model, 256), negentropy_rate(model))}) {
      CHECK(r.bound() == r.factors().cp * r.factors().plant_factor * r.factors().entropy_factor);
      CHECK(r.factors().plant_factor >= 1.0);
      CHECK(r.factors().entropy_factor > 0.0);
    }
  }
}
