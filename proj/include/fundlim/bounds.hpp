#pragma once

#include <optional>
#include <string>

#include "fundlim/disturbance.hpp"
#include "fundlim/norm_order.hpp"
#include "fundlim/plant_analysis.hpp"

namespace fundlim {

/// Which lower-bound formula produced a report.
enum class BoundKind {
  kErrorLti,        // T1: error signal, LTI plant, unstable-pole factor
  kOutput,          // T2: plant output, NMP-zero factor and leading gain
  kErrorGeneric,    // T3: error signal, any strictly causal plant
  kVariance,        // C2: T1 at p = 2
  kMaxDeviation,    // C3: T1 at p = inf
  kSpectral,        // C4: power-spectral form with negentropy rate
  kKolmogorovSzego  // KS: spectral form at p = 2, stable plant, Gaussian disturbance
};

/// "T1", "T2", "T3", "C2", "C3", "C4" or "KS".
std::string to_string(BoundKind kind);
/// Inverse of to_string; throws InputError on an unknown tag.
BoundKind bound_kind_from_string(const std::string& tag);

struct BoundFactors {
  double cp;              // 1 / (2 Gamma((p+1)/p) (p e)^{1/p})
  double plant_factor;    // unstable-pole product (T1) or NMP-zero product (T2); 1 for T3
  double entropy_factor;  // 2^{entropy rate}, times |rho| for T2
};

/// Lower bound on limsup [E|s_k|^p]^{1/p}, with bound == cp * plant * entropy
/// computed once from the stored factors.
class BoundReport {
 public:
  BoundReport(NormOrder p, BoundKind kind, BoundFactors factors);

  NormOrder p() const { return p_; }
  BoundKind kind() const { return kind_; }
  const BoundFactors& factors() const { return factors_; }
  double bound() const { return bound_; }

  /// Squared (variance) floor; only defined for p = 2.
  std::optional<double> variance_floor() const;

  /// Leading Markov gain |rho| folded into the entropy factor (T2 only).
  std::optional<double> gain() const { return gain_; }
  void set_gain(double g) { gain_ = g; }

 private:
  NormOrder p_;
  BoundKind kind_;
  BoundFactors factors_;
  double bound_;
  std::optional<double> gain_;
};

/// 1 / (2 Gamma((p+1)/p) (p e)^{1/p}); 1/2 at p = inf, 1/sqrt(2 pi e) at p = 2.
double cp_constant(NormOrder p);

BoundReport error_bound_lti(NormOrder p, const PlantCharacteristics& chars, const EntropySummary& ent);
BoundReport error_bound_p2(const PlantCharacteristics& chars, const EntropySummary& ent);
BoundReport error_bound_pinf(const PlantCharacteristics& chars, const EntropySummary& ent);

/// Spectral route: sqrt(2 pi e) cp * pole product * 2^{-J} * 2^{(1/2pi) int log2 sqrt(S)}.
BoundReport error_bound_spectral(NormOrder p, const PlantCharacteristics& chars,
                                 const SpectralDensity& spectrum, double negentropy);

/// Output floor cp * |rho| * NMP-zero product * 2^{entropy rate}.
/// Throws ZeroTransferFunction when rho == 0.
BoundReport output_bound(NormOrder p, const PlantCharacteristics& chars, const EntropySummary& ent);

BoundReport error_bound_generic(NormOrder p, const EntropySummary& ent);
/// Non-asymptotic form at one time step, from h(d_k | d_0..k-1) directly.
BoundReport error_bound_generic_at(NormOrder p, double conditional_entropy_bits);

}  // namespace fundlim
