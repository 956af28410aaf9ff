#include "fundlim/bounds.hpp"

#include <cmath>
#include <numbers>

#include "fundlim/errors.hpp"

namespace fundlim {

namespace {

double entropy_power(double bits) {
  if (!std::isfinite(bits)) throw InvalidModel("conditional entropy rate must be finite");
  return std::exp2(bits);
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kErrorLti: return "T1";
    case BoundKind::kOutput: return "T2";
    case BoundKind::kErrorGeneric: return "T3";
    case BoundKind::kVariance: return "C2";
    case BoundKind::kMaxDeviation: return "C3";
    case BoundKind::kSpectral: return "C4";
    case BoundKind::kKolmogorovSzego: return "KS";
  }
  return "?";
}

BoundKind bound_kind_from_string(const std::string& tag) {
  for (auto k : {BoundKind::kErrorLti, BoundKind::kOutput, BoundKind::kErrorGeneric, BoundKind::kVariance,
                 BoundKind::kMaxDeviation, BoundKind::kSpectral, BoundKind::kKolmogorovSzego}) {
    if (to_string(k) == tag) return k;
  }
  throw InputError("unknown theorem tag '" + tag + "' (expected T1, T2, T3, C2, C3, C4 or KS)");
}

BoundReport::BoundReport(NormOrder p, BoundKind kind, BoundFactors factors)
    : p_(p), kind_(kind), factors_(factors), bound_(factors.cp * factors.plant_factor * factors.entropy_factor) {}

std::optional<double> BoundReport::variance_floor() const {
  if (p_.is_infinite() || p_.value() != 2.0) return std::nullopt;
  return bound_ * bound_;
}

double cp_constant(NormOrder p) {
  if (p.is_infinite()) return 0.5;
  if (p.value() == 2.0) return 1.0 / std::sqrt(2.0 * std::numbers::pi * std::numbers::e);
  const double q = p.value();
  // log-domain keeps (p e)^{1/p} accurate for large p
  return std::exp(-std::log(2.0) - std::lgamma(1.0 + 1.0 / q) - (std::log(q) + 1.0) / q);
}

BoundReport error_bound_lti(NormOrder p, const PlantCharacteristics& chars, const EntropySummary& ent) {
  return BoundReport(p, BoundKind::kErrorLti,
                     {cp_constant(p), chars.unstable_pole_product, entropy_power(ent.conditional_entropy_rate)});
}

BoundReport error_bound_p2(const PlantCharacteristics& chars, const EntropySummary& ent) {
  const NormOrder p(2.0);
  return BoundReport(p, BoundKind::kVariance,
                     {cp_constant(p), chars.unstable_pole_product, entropy_power(ent.conditional_entropy_rate)});
}

BoundReport error_bound_pinf(const PlantCharacteristics& chars, const EntropySummary& ent) {
  const auto p = NormOrder::infinity();
  return BoundReport(p, BoundKind::kMaxDeviation,
                     {cp_constant(p), chars.unstable_pole_product, entropy_power(ent.conditional_entropy_rate)});
}

BoundReport error_bound_spectral(NormOrder p, const PlantCharacteristics& chars,
                                 const SpectralDensity& spectrum, double negentropy) {
  // sqrt(2 pi e) * 2^{-J} * 2^{(1/2pi) int log2 sqrt(S)} is 2^{h_inf(d)}.
  const double rate = szego_entropy_rate(spectrum, negentropy);
  const bool ks = !p.is_infinite() && p.value() == 2.0 && chars.unstable_pole_product == 1.0 && negentropy == 0.0;
  return BoundReport(p, ks ? BoundKind::kKolmogorovSzego : BoundKind::kSpectral,
                     {cp_constant(p), chars.unstable_pole_product, entropy_power(rate)});
}

BoundReport output_bound(NormOrder p, const PlantCharacteristics& chars, const EntropySummary& ent) {
  if (chars.markov_gain == 0.0) {
    throw ZeroTransferFunction("output bound needs a nonzero leading Markov parameter");
  }
  const double gain = std::abs(chars.markov_gain);
  BoundReport report(p, BoundKind::kOutput,
                     {cp_constant(p), chars.nmp_zero_product, gain * entropy_power(ent.conditional_entropy_rate)});
  report.set_gain(gain);
  return report;
}

BoundReport error_bound_generic(NormOrder p, const EntropySummary& ent) {
  return error_bound_generic_at(p, ent.conditional_entropy_rate);
}

BoundReport error_bound_generic_at(NormOrder p, double conditional_entropy_bits) {
  return BoundReport(p, BoundKind::kErrorGeneric, {cp_constant(p), 1.0, entropy_power(conditional_entropy_bits)});
}

}  // namespace fundlim
